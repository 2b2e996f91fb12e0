#include "spot/trajectory.hpp"

#include <algorithm>

namespace spot {

PiecewiseTrajectory::PiecewiseTrajectory(std::vector<PieceCoeffs> pieces,
                                         std::vector<double> durations,
                                         double start_time)
    : pieces_(std::move(pieces)),
      durations_(std::move(durations)),
      start_time_(start_time) {
  if (pieces_.size() != durations_.size())
    throw std::invalid_argument("PiecewiseTrajectory: size mismatch");
  offsets_.reserve(durations_.size());
  for (double d : durations_) {
    if (!(d > 0.0))
      throw std::invalid_argument("PiecewiseTrajectory: non-positive duration");
    offsets_.push_back(total_);
    total_ += d;
  }
}

Vec3 PiecewiseTrajectory::sample(double t, int derivative) const {
  if (pieces_.empty())
    throw std::logic_error("PiecewiseTrajectory: empty trajectory");
  t = std::clamp(t, 0.0, total_);
  // Piece index: last offset <= t (final endpoint maps to the last piece).
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), t);
  const std::size_t i = static_cast<std::size_t>(
      std::max<std::ptrdiff_t>(0, it - offsets_.begin() - 1));
  const double local = t - offsets_[i];
  switch (derivative) {
    case 0: return pieces_[i].transpose() * beta0(local);
    case 1: return pieces_[i].transpose() * beta1(local);
    case 2: return pieces_[i].transpose() * beta2(local);
    default: return pieces_[i].transpose() * beta3(local);
  }
}

double PiecewiseTrajectory::squared_jerk_integral() const {
  double total = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double T = durations_[i];
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    const Vec3 c3 = pieces_[i].row(3);
    const Vec3 c4 = pieces_[i].row(4);
    const Vec3 c5 = pieces_[i].row(5);
    total += 36.0 * c3.squaredNorm() * T + 144.0 * c3.dot(c4) * T2 +
             (192.0 * c4.squaredNorm() + 240.0 * c3.dot(c5)) * T3 +
             720.0 * c4.dot(c5) * T4 + 720.0 * c5.squaredNorm() * T5;
  }
  return total;
}

std::vector<TrajectorySample> sample_trajectory(const PiecewiseTrajectory &traj,
                                                double dt_sample) {
  if (!(dt_sample > 0.0))
    throw std::invalid_argument("sample_trajectory: dt must be positive");
  const double T = traj.total_duration();
  const int n = std::max(1, static_cast<int>(std::ceil(T / dt_sample - 1e-9)));
  std::vector<TrajectorySample> out;
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(i * dt_sample, T);
    out.push_back({STState(traj.position(t), traj.start_time() + t),
                   traj.velocity(t), traj.acceleration(t)});
  }
  return out;
}

}  // namespace spot
