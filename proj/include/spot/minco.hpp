#pragma once

#include "spot/trajectory.hpp"

#include <vector>

namespace spot {

// Banded square matrix with LU factorization (no pivoting) and solves
// for both M x = b and M^T x = b. Column-major band storage.
class BandedSystem {
 public:
  void create(int n, int lower, int upper);
  double &at(int row, int col) {
    return data_[static_cast<std::size_t>(row - col + upper_) * n_ + col];
  }
  double at(int row, int col) const {
    return data_[static_cast<std::size_t>(row - col + upper_) * n_ + col];
  }
  void factorize();
  void solve(Eigen::MatrixXd &b) const;           // M x = b, in place
  void solve_transpose(Eigen::MatrixXd &b) const; // M^T x = b, in place

 private:
  int n_ = 0, lower_ = 0, upper_ = 0;
  std::vector<double> data_;
};

// Unique minimum-jerk piecewise quintic through fixed-time waypoints:
// boundary position/velocity/acceleration pinned at both ends, interior
// junctions pass through q_k with continuity up to the fourth derivative
// (the jerk-optimality conditions). Durations are fixed up front; only
// the waypoints vary between solves, so the band factorization is reused.
class MincoJerk {
 public:
  // durations: one per piece (N >= 1); waypoint count is N - 1.
  void setup(const BoundaryState &head, const BoundaryState &tail,
             const std::vector<double> &durations);

  void solve(const Eigen::Matrix3Xd &waypoints);

  // Coefficients of the last solve, 6N x 3 (piece i in rows 6i..6i+5).
  const Eigen::MatrixXd &coefficients() const { return coeffs_; }

  int piece_count() const { return n_; }
  const std::vector<double> &durations() const { return durations_; }

  double squared_jerk() const;
  // dJs/dC, same layout as coefficients().
  Eigen::MatrixXd squared_jerk_gradient() const;

  // Chain any dJ/dC back to the waypoints via the adjoint band solve.
  Eigen::Matrix3Xd propagate_gradient(const Eigen::MatrixXd &grad_coeffs) const;

  PiecewiseTrajectory trajectory(double start_time) const;

 private:
  int n_ = 0;
  std::vector<double> durations_;
  BoundaryState head_, tail_;
  BandedSystem band_;
  Eigen::MatrixXd coeffs_;
};

// Convenience wrapper matching the one-shot mapping contract.
PiecewiseTrajectory minco_map(const std::vector<Vec3> &waypoints,
                              const std::vector<double> &durations,
                              const BoundaryState &head,
                              const BoundaryState &tail,
                              double start_time = 0.0);

}  // namespace spot
