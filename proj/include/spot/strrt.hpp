#pragma once

#include "spot/collision.hpp"
#include "spot/core.hpp"
#include "spot/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spot {

// Feasibility set membership: strict time increase plus velocity bound.
inline bool is_admissible(const STState &parent, const STState &child,
                          double v_max) {
  const double dt = child.time - parent.time;
  return dt > 0.0 && (child.position - parent.position).norm() <= v_max * dt;
}

// Weighted space-time edge cost; w acts as a desired velocity.
inline double edge_cost(const STState &a, const STState &b, double w) {
  if (b.time < a.time) throw std::invalid_argument("edge_cost: reversed edge");
  return (b.position - a.position).norm() + w * (b.time - a.time);
}

// Spatial draw from the informed prolate hyperspheroid (uniform over the
// bounding box until a first solution exists), with the decoupled time
// draw t = start.time + k * c_best / w, k ~ U(0,1). When c_best is
// infinite the time falls back to U(0, fallback_horizon) past the start.
STState sample_informed(const STState &start, const Vec3 &goal_pos,
                        double c_best, const AABB &bounds, double w, Rng &rng,
                        double fallback_horizon = 10.0);

// Clip the sample to at most `step` meters from nearest, then assign the
// arrival time so the result lies in F(nearest).
STState steer(const STState &nearest, const STState &target,
              const PlannerParams &params, double step);

// Safety of every interpolated state along the edge, spacing bounded by
// check_resolution both spatially and (scaled by v_max) in time.
bool edge_collision_free(const STState &a, const STState &b,
                         const StaticIndex &static_idx,
                         const TemporalHashGrid &grid, double r_min,
                         double check_resolution, double v_max);

struct TreeNode {
  STState state;
  int parent = -1;
  double cost_from_root = 0.0;
  std::vector<int> children;
  bool valid = true;
};

enum class PlanStatus { found, not_found_within_budget };

struct PlanResult {
  std::vector<STState> path;
  double c_best = kInf;
  std::size_t tree_size = 0;
  PlanStatus status = PlanStatus::not_found_within_budget;
  std::string diagnostic;
};

// Spatio-temporal RRT*: nodes carry arrival times, every edge satisfies
// the causality + velocity feasibility set, nearest/near queries use the
// weighted edge-cost metric, and sampling turns informed once a first
// solution bounds the search. A tree is single-writer; the collision
// structures passed in are read-only snapshots.
class StRrtStar {
 public:
  StRrtStar(const PlannerParams &params, const AABB &bounds, uint64_t seed);

  // Swap in the latest collision snapshot (non-owning, caller keeps alive).
  void set_world(const StaticIndex *static_idx, const TemporalHashGrid *grid);

  PlanResult plan(const STState &start, const Vec3 &goal_pos, int iterations);

  // Continue sampling on the existing tree; re-validates the incumbent
  // path against the current snapshot and demotes it when an edge went
  // unsafe. Requires a prior plan() call.
  PlanResult refine(int iterations);

  // One RRT* extension; exposed for tests. Returns the inserted node id.
  std::optional<int> extend(const STState &sample);

  const std::vector<TreeNode> &nodes() const { return nodes_; }
  double c_best() const;
  const Vec3 &goal_position() const { return goal_pos_; }

 private:
  double metric_to(const TreeNode &n, const STState &s) const;
  int nearest(const STState &s) const;
  std::vector<int> near_set(const STState &s, double radius) const;
  double near_radius() const;
  bool state_safe(const STState &s) const;
  bool edge_safe(const STState &a, const STState &b) const;
  void collect_subtree(int id, std::vector<int> &out) const;
  bool try_rewire(int new_id, int candidate);
  void invalidate_subtree(int id);
  void recompute_costs(int id);
  int first_invalid_on_path(int goal_node) const;
  PlanResult harvest();
  STState draw_sample();
  bool is_goal(const STState &s) const;

  PlannerParams params_;
  AABB bounds_;
  Rng rng_;
  const StaticIndex *static_idx_ = nullptr;
  const TemporalHashGrid *grid_ = nullptr;

  std::vector<TreeNode> nodes_;
  std::vector<int> goal_nodes_;
  STState start_;
  Vec3 goal_pos_ = Vec3::Zero();
  double c_min_ = 0.0;
  double fallback_horizon_ = 10.0;
  bool planned_ = false;
};

}  // namespace spot
