#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spot {

using Vec3 = Eigen::Vector3d;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(const Vec3 &v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

// A point in space-time: position plus arrival time on the absolute
// simulation clock. All planner tree nodes, path states and safety
// queries use this one clock; obstacle observation stamps share it too.
struct STState {
  Vec3 position{Vec3::Zero()};
  double time{0.0};

  STState() = default;
  STState(const Vec3 &p, double t) : position(p), time(t) {}
};

// One sensed obstacle point with the velocity it inherited from its
// tracked object, stamped with the observation time.
struct DynamicPoint {
  Vec3 position{Vec3::Zero()};
  Vec3 velocity{Vec3::Zero()};
  double observed_at{0.0};

  DynamicPoint() = default;
  DynamicPoint(const Vec3 &p, const Vec3 &v, double t0)
      : position(p), velocity(v), observed_at(t0) {}
};

// Constant-velocity forward prediction of a dynamic point.
inline Vec3 predict_obstacle(const DynamicPoint &point, double t) {
  if (!std::isfinite(t))
    throw std::invalid_argument("predict_obstacle: non-finite time");
  if (t < point.observed_at)
    throw std::invalid_argument("predict_obstacle: t precedes observation");
  return point.position + point.velocity * (t - point.observed_at);
}

// Linear interpolation along a space-time edge, s in [0,1].
inline STState interpolate_state(const STState &a, const STState &b, double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("interpolate_state: s outside [0,1]");
  if (b.time < a.time)
    throw std::invalid_argument("interpolate_state: reversed edge");
  return STState(a.position + s * (b.position - a.position),
                 a.time + s * (b.time - a.time));
}

struct AABB {
  Vec3 lo{Vec3::Zero()};
  Vec3 hi{Vec3::Zero()};

  bool contains(const Vec3 &p, double margin = 0.0) const {
    return (p.array() >= lo.array() + margin).all() &&
           (p.array() <= hi.array() - margin).all();
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
};

// Every tunable the pipeline consumes, seeded with the experiment
// defaults (v_max 1 m/s, 6 m sensing, corridor step 0.2 s, 2 s segment
// cap). Values the source experiments leave open carry named defaults
// documented in the scenario file reference.
struct PlannerParams {
  // Kinematics and safety.
  double v_max = 1.0;        // m/s
  double w = 1.0;            // temporal weight of the edge cost (desired velocity)
  double r_min = 0.4;        // m, safety threshold
  // Spatio-temporal hash grid.
  double dt_grid = 0.1;      // s, grid time resolution
  double cell_size = 0.5;    // m, must exceed r_min so the 27-neighborhood covers it
  // Corridor construction.
  double dt_corridor = 0.2;          // s, temporal sampling inside a segment
  double max_segment_horizon = 2.0;  // s, cap on any one segment's span
  // Sensing / budgets.
  double sensing_range = 6.0;  // m
  double plan_time_budget = 0.05;  // s, nominal per-cycle budget (sets grid horizon)
  double goal_radius = 0.5;    // m

  // Tree expansion.
  double step = 1.0;              // m, steer step
  double check_resolution = 0.1;  // m, edge collision sampling
  double goal_bias = 0.05;
  int initial_iterations = 2500;  // sampling budget, Initial mode
  int refine_iterations = 250;    // sampling budget per Incremental cycle
  int max_tree_size = 4000;

  // Trajectory optimization.
  double a_max = 4.0;               // m/s^2
  double corridor_weight = 1.0e4;   // penalty weight per corridor halfspace
  double dynamics_weight = 1.0e3;   // penalty weight for velocity/acceleration
  int samples_per_segment = 16;     // midpoint quadrature density for penalties
  int lbfgs_max_iterations = 60;
  double verify_dt = 0.05;          // s, hard post-check sampling
  double verify_tolerance = 1.0e-3; // m, admissible corridor violation

  // Mission executive.
  double hover_speed = 0.05;        // m/s, below this counts as hovering
  double hover_time = 1.0;          // s, sustained hover before backup triggers
  double backup_budget_factor = 0.5;

  void validate() const {
    auto positive = [](double v, const char *name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("PlannerParams: ") + name +
                                    " must be positive and finite");
    };
    positive(v_max, "v_max");
    positive(r_min, "r_min");
    positive(dt_grid, "dt_grid");
    positive(cell_size, "cell_size");
    positive(dt_corridor, "dt_corridor");
    positive(sensing_range, "sensing_range");
    positive(plan_time_budget, "plan_time_budget");
    positive(goal_radius, "goal_radius");
    positive(step, "step");
    positive(check_resolution, "check_resolution");
    positive(a_max, "a_max");
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("PlannerParams: w must be >= 0");
    if (max_segment_horizon < dt_corridor)
      throw std::invalid_argument(
          "PlannerParams: max_segment_horizon must be >= dt_corridor");
  }
};

}  // namespace spot
