#include "spot/minco.hpp"

namespace spot {

void BandedSystem::create(int n, int lower, int upper) {
  n_ = n;
  lower_ = lower;
  upper_ = upper;
  data_.assign(static_cast<std::size_t>(lower + upper + 1) * n, 0.0);
}

void BandedSystem::factorize() {
  for (int k = 0; k < n_ - 1; ++k) {
    const double pivot = at(k, k);
    const int i_max = std::min(k + lower_, n_ - 1);
    const int j_max = std::min(k + upper_, n_ - 1);
    for (int i = k + 1; i <= i_max; ++i) {
      const double factor = at(i, k) / pivot;
      at(i, k) = factor;  // store L below the diagonal
      for (int j = k + 1; j <= j_max; ++j) at(i, j) -= factor * at(k, j);
    }
  }
}

void BandedSystem::solve(Eigen::MatrixXd &b) const {
  // Forward: L y = b (unit diagonal).
  for (int k = 0; k < n_; ++k) {
    const int i_max = std::min(k + lower_, n_ - 1);
    for (int i = k + 1; i <= i_max; ++i) b.row(i) -= at(i, k) * b.row(k);
  }
  // Backward: U x = y.
  for (int k = n_ - 1; k >= 0; --k) {
    b.row(k) /= at(k, k);
    const int i_min = std::max(k - upper_, 0);
    for (int i = i_min; i < k; ++i) b.row(i) -= at(i, k) * b.row(k);
  }
}

void BandedSystem::solve_transpose(Eigen::MatrixXd &b) const {
  // M^T = U^T L^T. Forward: U^T y = b (U^T is lower triangular).
  for (int k = 0; k < n_; ++k) {
    b.row(k) /= at(k, k);
    const int i_max = std::min(k + upper_, n_ - 1);
    for (int i = k + 1; i <= i_max; ++i) b.row(i) -= at(k, i) * b.row(k);
  }
  // Backward: L^T x = y (unit diagonal).
  for (int k = n_ - 1; k >= 0; --k) {
    const int i_min = std::max(k - lower_, 0);
    for (int i = i_min; i < k; ++i) b.row(i) -= at(k, i) * b.row(k);
  }
}

void MincoJerk::setup(const BoundaryState &head, const BoundaryState &tail,
                      const std::vector<double> &durations) {
  if (durations.empty())
    throw std::invalid_argument("MincoJerk: need at least one piece");
  for (double T : durations)
    if (!(T > 0.0) || !std::isfinite(T))
      throw std::invalid_argument("MincoJerk: durations must be positive");

  n_ = static_cast<int>(durations.size());
  durations_ = durations;
  head_ = head;
  tail_ = tail;
  coeffs_.setZero(6 * n_, 3);

  band_.create(6 * n_, 6, 6);
  band_.at(0, 0) = 1.0;
  band_.at(1, 1) = 1.0;
  band_.at(2, 2) = 2.0;
  for (int i = 0; i < n_ - 1; ++i) {
    const int r = 6 * i + 3;
    const int c = 6 * i;
    const auto b0 = beta0(durations_[i]);
    const auto b1 = beta1(durations_[i]);
    const auto b2 = beta2(durations_[i]);
    const auto b3 = beta3(durations_[i]);
    // Jerk and snap continuity.
    for (int k = 3; k < 6; ++k) band_.at(r, c + k) = b3[k];
    band_.at(r, c + 9) = -6.0;
    band_.at(r + 1, c + 4) = 24.0;
    band_.at(r + 1, c + 5) = 120.0 * durations_[i];
    band_.at(r + 1, c + 10) = -24.0;
    // Waypoint interpolation and C2 continuity.
    for (int k = 0; k < 6; ++k) band_.at(r + 2, c + k) = b0[k];
    for (int k = 0; k < 6; ++k) band_.at(r + 3, c + k) = b0[k];
    band_.at(r + 3, c + 6) = -1.0;
    for (int k = 1; k < 6; ++k) band_.at(r + 4, c + k) = b1[k];
    band_.at(r + 4, c + 7) = -1.0;
    for (int k = 2; k < 6; ++k) band_.at(r + 5, c + k) = b2[k];
    band_.at(r + 5, c + 8) = -2.0;
  }
  const int r = 6 * n_ - 3;
  const int c = 6 * (n_ - 1);
  const double T = durations_.back();
  const auto b0 = beta0(T);
  const auto b1 = beta1(T);
  const auto b2 = beta2(T);
  for (int k = 0; k < 6; ++k) band_.at(r, c + k) = b0[k];
  for (int k = 1; k < 6; ++k) band_.at(r + 1, c + k) = b1[k];
  for (int k = 2; k < 6; ++k) band_.at(r + 2, c + k) = b2[k];
  band_.factorize();
}

void MincoJerk::solve(const Eigen::Matrix3Xd &waypoints) {
  if (waypoints.cols() != n_ - 1)
    throw std::invalid_argument("MincoJerk: waypoint count must be N-1");
  coeffs_.setZero(6 * n_, 3);
  coeffs_.row(0) = head_.position.transpose();
  coeffs_.row(1) = head_.velocity.transpose();
  coeffs_.row(2) = head_.acceleration.transpose();
  for (int i = 0; i < n_ - 1; ++i)
    coeffs_.row(6 * i + 5) = waypoints.col(i).transpose();
  coeffs_.row(6 * n_ - 3) = tail_.position.transpose();
  coeffs_.row(6 * n_ - 2) = tail_.velocity.transpose();
  coeffs_.row(6 * n_ - 1) = tail_.acceleration.transpose();
  band_.solve(coeffs_);
}

double MincoJerk::squared_jerk() const {
  double total = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double T = durations_[i];
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    const Eigen::RowVector3d c3 = coeffs_.row(6 * i + 3);
    const Eigen::RowVector3d c4 = coeffs_.row(6 * i + 4);
    const Eigen::RowVector3d c5 = coeffs_.row(6 * i + 5);
    total += 36.0 * c3.squaredNorm() * T + 144.0 * c3.dot(c4) * T2 +
             (192.0 * c4.squaredNorm() + 240.0 * c3.dot(c5)) * T3 +
             720.0 * c4.dot(c5) * T4 + 720.0 * c5.squaredNorm() * T5;
  }
  return total;
}

Eigen::MatrixXd MincoJerk::squared_jerk_gradient() const {
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(6 * n_, 3);
  for (int i = 0; i < n_; ++i) {
    const double T = durations_[i];
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    const Eigen::RowVector3d c3 = coeffs_.row(6 * i + 3);
    const Eigen::RowVector3d c4 = coeffs_.row(6 * i + 4);
    const Eigen::RowVector3d c5 = coeffs_.row(6 * i + 5);
    grad.row(6 * i + 3) = 72.0 * c3 * T + 144.0 * c4 * T2 + 240.0 * c5 * T3;
    grad.row(6 * i + 4) = 144.0 * c3 * T2 + 384.0 * c4 * T3 + 720.0 * c5 * T4;
    grad.row(6 * i + 5) = 240.0 * c3 * T3 + 720.0 * c4 * T4 + 1440.0 * c5 * T5;
  }
  return grad;
}

Eigen::Matrix3Xd MincoJerk::propagate_gradient(
    const Eigen::MatrixXd &grad_coeffs) const {
  Eigen::MatrixXd adj = grad_coeffs;
  band_.solve_transpose(adj);
  Eigen::Matrix3Xd grad_q(3, std::max(n_ - 1, 0));
  for (int i = 0; i < n_ - 1; ++i)
    grad_q.col(i) = adj.row(6 * i + 5).transpose();
  return grad_q;
}

PiecewiseTrajectory MincoJerk::trajectory(double start_time) const {
  std::vector<PieceCoeffs> pieces(n_);
  for (int i = 0; i < n_; ++i) pieces[i] = coeffs_.block<6, 3>(6 * i, 0);
  return PiecewiseTrajectory(std::move(pieces), durations_, start_time);
}

PiecewiseTrajectory minco_map(const std::vector<Vec3> &waypoints,
                              const std::vector<double> &durations,
                              const BoundaryState &head,
                              const BoundaryState &tail, double start_time) {
  if (waypoints.size() + 1 != durations.size())
    throw std::invalid_argument("minco_map: need |q| = N - 1");
  MincoJerk minco;
  minco.setup(head, tail, durations);
  Eigen::Matrix3Xd q(3, static_cast<int>(waypoints.size()));
  for (std::size_t i = 0; i < waypoints.size(); ++i) q.col(i) = waypoints[i];
  minco.solve(q);
  return minco.trajectory(start_time);
}

}  // namespace spot
