#pragma once

#include "spot/core.hpp"

#include <vector>

namespace spot {

struct BoundaryState {
  Vec3 position{Vec3::Zero()};
  Vec3 velocity{Vec3::Zero()};
  Vec3 acceleration{Vec3::Zero()};
};

// Quintic coefficients for one piece, row k = the t^k coefficient per axis.
using PieceCoeffs = Eigen::Matrix<double, 6, 3>;

inline Eigen::Matrix<double, 6, 1> beta0(double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  return (Eigen::Matrix<double, 6, 1>() << 1, t, t2, t3, t4, t5).finished();
}
inline Eigen::Matrix<double, 6, 1> beta1(double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  return (Eigen::Matrix<double, 6, 1>() << 0, 1, 2 * t, 3 * t2, 4 * t3, 5 * t4)
      .finished();
}
inline Eigen::Matrix<double, 6, 1> beta2(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return (Eigen::Matrix<double, 6, 1>() << 0, 0, 2, 6 * t, 12 * t2, 20 * t3)
      .finished();
}
inline Eigen::Matrix<double, 6, 1> beta3(double t) {
  return (Eigen::Matrix<double, 6, 1>() << 0, 0, 0, 6, 24 * t, 60 * t * t)
      .finished();
}

// N quintic pieces with fixed durations; piece-local time in [0, T_i],
// trajectory time in [0, sum T_i], plus the absolute start stamp.
class PiecewiseTrajectory {
 public:
  PiecewiseTrajectory() = default;
  PiecewiseTrajectory(std::vector<PieceCoeffs> pieces,
                      std::vector<double> durations, double start_time);

  Vec3 position(double t) const { return sample(t, 0); }
  Vec3 velocity(double t) const { return sample(t, 1); }
  Vec3 acceleration(double t) const { return sample(t, 2); }
  Vec3 jerk(double t) const { return sample(t, 3); }

  double total_duration() const { return total_; }
  double start_time() const { return start_time_; }
  std::size_t piece_count() const { return pieces_.size(); }
  const std::vector<PieceCoeffs> &pieces() const { return pieces_; }
  const std::vector<double> &durations() const { return durations_; }
  bool empty() const { return pieces_.empty(); }

  // Closed-form integral of the squared jerk norm over [0, T].
  double squared_jerk_integral() const;

 private:
  Vec3 sample(double t, int derivative) const;

  std::vector<PieceCoeffs> pieces_;
  std::vector<double> durations_;
  std::vector<double> offsets_;  // cumulative start of each piece
  double total_ = 0.0;
  double start_time_ = 0.0;
};

struct TrajectorySample {
  STState state;   // absolute time
  Vec3 velocity;
  Vec3 acceleration;
};

// Dense samples over [0, T], endpoints included.
std::vector<TrajectorySample> sample_trajectory(const PiecewiseTrajectory &traj,
                                                double dt_sample);

}  // namespace spot
