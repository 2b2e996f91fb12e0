#pragma once

#include "spot/minco.hpp"
#include "spot/polytope.hpp"
#include "spot/sfc.hpp"

#include <vector>

namespace spot {

// One entry per vertex of the waypoint's containing polytope; the decoded
// point is the normalized-squared convex combination, interior for any
// finite nonzero vector.
struct WaypointParam {
  Eigen::VectorXd xi;
};

// q = sum_v (xi_v^2 / ||xi||^2) * vertex_v. Throws on all-zero xi.
Vec3 decode_waypoint(const Eigen::VectorXd &xi, const std::vector<Vec3> &vertices);

std::vector<Vec3> decode_waypoints(const std::vector<WaypointParam> &params,
                                   const std::vector<std::vector<Vec3>> &vertex_sets);

// Parameter vector reproducing `p` approximately (multiplicative-update
// least squares over the simplex); used to seed the optimizer at the
// skeletal path's junctions.
Eigen::VectorXd xi_for_point(const Vec3 &p, const std::vector<Vec3> &vertices);

struct ObjectiveTerms {
  double smoothness = 0.0;  // integral of squared jerk
  double penalty = 0.0;     // corridor + dynamic-limit cubic penalties
  double total() const { return smoothness + penalty; }
};

// Cubic-penalty objective over midpoint samples per piece; piece i is
// constrained by corridor segment i's halfspaces only.
ObjectiveTerms objective(const PiecewiseTrajectory &traj, const Corridor &corridor,
                         const PlannerParams &params);

struct OptimizeResult {
  PiecewiseTrajectory trajectory;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Hard post-check at params.verify_dt resolution.
  double max_corridor_violation = 0.0;
  bool verified = false;
};

// Quasi-Newton descent over the xi parameterization with the analytic
// gradient chained through the waypoint decoding and the minimum-jerk
// map. Durations come from the corridor's segment time tags. Boundary
// states are met exactly by construction.
OptimizeResult optimize_trajectory(const Corridor &corridor,
                                   const BoundaryState &start,
                                   const BoundaryState &goal,
                                   const PlannerParams &params,
                                   const std::vector<WaypointParam> *init = nullptr);

// Max halfspace violation of any sample against its piece's segment.
double corridor_violation(const PiecewiseTrajectory &traj,
                          const Corridor &corridor, double dt_sample);

}  // namespace spot
