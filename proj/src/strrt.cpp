#include "spot/strrt.hpp"

#include <algorithm>

namespace spot {

namespace {

// Minimal hover edge duration when the target carries no usable time.
constexpr double kMinEdgeDt = 1e-6;

// Bump dt upward until the velocity bound holds exactly in doubles.
inline double feasible_dt(double dist, double dt, double v_max) {
  while (v_max * dt < dist) dt = std::nextafter(dt, kInf);
  return dt;
}

// Orthonormal frame whose first column points along dir (unit).
Eigen::Matrix3d frame_along(const Vec3 &dir) {
  Eigen::Matrix3d rot;
  rot.col(0) = dir;
  const Vec3 up = std::abs(dir.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(0, 1, 0);
  rot.col(1) = dir.cross(up).normalized();
  rot.col(2) = dir.cross(rot.col(1));
  return rot;
}

}  // namespace

STState sample_informed(const STState &start, const Vec3 &goal_pos,
                        double c_best, const AABB &bounds, double w, Rng &rng,
                        double fallback_horizon) {
  if (!std::isfinite(c_best)) {
    return STState(rng.uniform_in_box(bounds),
                   start.time + rng.uniform() * fallback_horizon);
  }

  const Vec3 diff = goal_pos - start.position;
  const double c_min = diff.norm();
  if (c_best < c_min)
    throw std::invalid_argument("sample_informed: c_best below c_min");
  if (!(w > 0.0))
    throw std::invalid_argument("sample_informed: w must be positive");

  const Vec3 center = 0.5 * (start.position + goal_pos);
  const double a = 0.5 * c_best;
  const double r = 0.5 * std::sqrt(std::max(c_best * c_best - c_min * c_min, 0.0));
  const Eigen::Matrix3d rot =
      c_min > 1e-12 ? frame_along(diff / c_min) : Eigen::Matrix3d::Identity();

  Vec3 p = 0.5 * (start.position + goal_pos);
  for (int attempt = 0; attempt < 1024; ++attempt) {
    const Vec3 ball = rng.uniform_in_ball();
    const Vec3 candidate =
        rot * Vec3(a * ball.x(), r * ball.y(), r * ball.z()) + center;
    if (bounds.contains(candidate)) {
      p = candidate;
      break;
    }
  }
  const double t = start.time + rng.uniform() * (c_best / w);
  return STState(p, t);
}

STState steer(const STState &nearest, const STState &target,
              const PlannerParams &params, double step) {
  const Vec3 delta = target.position - nearest.position;
  const double dist = delta.norm();
  const double reach = std::min(dist, step);
  const Vec3 p =
      dist > 1e-12 ? Vec3(nearest.position + delta * (reach / dist))
                   : nearest.position;
  double dt = std::max(target.time - nearest.time,
                       std::max(reach / params.v_max, kMinEdgeDt));
  dt = feasible_dt(reach, dt, params.v_max);
  return STState(p, nearest.time + dt);
}

bool edge_collision_free(const STState &a, const STState &b,
                         const StaticIndex &static_idx,
                         const TemporalHashGrid &grid, double r_min,
                         double check_resolution, double v_max) {
  const double dist = (b.position - a.position).norm();
  const double span = (b.time - a.time) * v_max;
  const int n = std::max<int>(
      1, static_cast<int>(std::ceil(std::max(dist, span) / check_resolution)));
  for (int i = 0; i <= n; ++i) {
    const STState s = interpolate_state(a, b, static_cast<double>(i) / n);
    if (!is_state_safe(static_idx, grid, s, r_min)) return false;
  }
  return true;
}

StRrtStar::StRrtStar(const PlannerParams &params, const AABB &bounds,
                     uint64_t seed)
    : params_(params), bounds_(bounds), rng_(seed) {}

void StRrtStar::set_world(const StaticIndex *static_idx,
                          const TemporalHashGrid *grid) {
  static_idx_ = static_idx;
  grid_ = grid;
}

bool StRrtStar::state_safe(const STState &s) const {
  if (!static_idx_ || !grid_) return true;
  return is_state_safe(*static_idx_, *grid_, s, params_.r_min);
}

bool StRrtStar::edge_safe(const STState &a, const STState &b) const {
  if (!static_idx_ || !grid_) return true;
  return edge_collision_free(a, b, *static_idx_, *grid_, params_.r_min,
                             params_.check_resolution, params_.v_max);
}

double StRrtStar::metric_to(const TreeNode &n, const STState &s) const {
  // Cost of the cheapest feasible edge from the node to the sample's
  // position: spatial length plus the weighted, velocity-floored time gap.
  const double dist = (s.position - n.state.position).norm();
  const double dt = std::max(s.time - n.state.time, dist / params_.v_max);
  return dist + params_.w * dt;
}

int StRrtStar::nearest(const STState &s) const {
  int best = -1;
  double best_metric = kInf;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (!nodes_[i].valid) continue;
    const double m = metric_to(nodes_[i], s);
    if (m < best_metric) {
      best_metric = m;
      best = i;
    }
  }
  return best;
}

std::vector<int> StRrtStar::near_set(const STState &s, double radius) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (!nodes_[i].valid) continue;
    const double dist = (s.position - nodes_[i].state.position).norm();
    const double cost = dist + params_.w * std::abs(s.time - nodes_[i].state.time);
    if (cost <= radius) out.push_back(i);
  }
  return out;
}

double StRrtStar::near_radius() const {
  // Shrinking-ball schedule in the 4-D state space, floored at the steer
  // step so early iterations still rewire.
  const double n = static_cast<double>(std::max<std::size_t>(nodes_.size(), 2));
  const double gamma = 8.0;
  return std::clamp(gamma * std::pow(std::log(n) / n, 0.25), 1.5 * params_.step,
                    4.0 * params_.step);
}

bool StRrtStar::is_goal(const STState &s) const {
  return (s.position - goal_pos_).norm() <= params_.goal_radius;
}

double StRrtStar::c_best() const {
  double best = kInf;
  for (int id : goal_nodes_)
    if (nodes_[id].valid) best = std::min(best, nodes_[id].cost_from_root);
  return best;
}

void StRrtStar::collect_subtree(int id, std::vector<int> &out) const {
  out.push_back(id);
  for (int c : nodes_[id].children)
    if (nodes_[c].valid) collect_subtree(c, out);
}

void StRrtStar::invalidate_subtree(int id) {
  nodes_[id].valid = false;
  for (int c : nodes_[id].children)
    if (nodes_[c].valid) invalidate_subtree(c);
}

void StRrtStar::recompute_costs(int id) {
  for (int c : nodes_[id].children) {
    if (!nodes_[c].valid) continue;
    nodes_[c].cost_from_root =
        nodes_[id].cost_from_root +
        edge_cost(nodes_[id].state, nodes_[c].state, params_.w);
    recompute_costs(c);
  }
}

// Re-parent `candidate` onto the new node when that lowers its cost. The
// candidate must lie in F(new) with its current arrival time; it is then
// re-timed to the tight arrival t_new + dist/v_max (never later than its
// old time), and all descendants shift with their edge durations kept.
// Any shifted edge failing the safety check vetoes the rewire wholesale.
bool StRrtStar::try_rewire(int new_id, int candidate) {
  TreeNode &cand = nodes_[candidate];
  const STState new_state = nodes_[new_id].state;
  if (!is_admissible(new_state, cand.state, params_.v_max)) return false;

  const double dist = (cand.state.position - new_state.position).norm();
  const double new_time =
      new_state.time +
      feasible_dt(dist, std::max(dist / params_.v_max, kMinEdgeDt),
                  params_.v_max);
  const STState retimed(cand.state.position, new_time);
  const double new_cost =
      nodes_[new_id].cost_from_root + edge_cost(new_state, retimed, params_.w);
  if (new_cost >= cand.cost_from_root - 1e-12) return false;
  if (!edge_safe(new_state, retimed)) return false;

  const double shift = new_time - cand.state.time;  // <= 0 by construction
  std::vector<int> subtree;
  collect_subtree(candidate, subtree);

  // Validate every descendant edge at its shifted absolute times.
  for (int id : subtree) {
    if (id == candidate) continue;
    const TreeNode &n = nodes_[id];
    const STState a(nodes_[n.parent].state.position,
                    nodes_[n.parent].state.time + shift);
    const STState b(n.state.position, n.state.time + shift);
    if (!is_admissible(a, b, params_.v_max)) return false;
    if (!edge_safe(a, b)) return false;
  }

  // Commit: detach from the old parent, shift times, rebuild costs.
  TreeNode &old_parent = nodes_[cand.parent];
  old_parent.children.erase(
      std::remove(old_parent.children.begin(), old_parent.children.end(),
                  candidate),
      old_parent.children.end());
  cand.parent = new_id;
  nodes_[new_id].children.push_back(candidate);
  for (int id : subtree) nodes_[id].state.time += shift;
  cand.cost_from_root = new_cost;
  recompute_costs(candidate);
  return true;
}

std::optional<int> StRrtStar::extend(const STState &sample) {
  if (nodes_.empty()) throw std::logic_error("extend: empty tree");
  if (static_cast<int>(nodes_.size()) >= params_.max_tree_size)
    return std::nullopt;

  const int nearest_id = nearest(sample);
  if (nearest_id < 0) return std::nullopt;
  const STState new_state =
      steer(nodes_[nearest_id].state, sample, params_, params_.step);
  if (!bounds_.contains(new_state.position)) return std::nullopt;
  if (!state_safe(new_state)) return std::nullopt;

  const std::vector<int> near = near_set(new_state, near_radius());

  // Choose parent among near nodes (nearest included) with a feasible,
  // collision-free edge to the steered state.
  int best_parent = -1;
  double best_cost = kInf;
  auto consider = [&](int id) {
    const TreeNode &n = nodes_[id];
    if (!is_admissible(n.state, new_state, params_.v_max)) return;
    const double cost =
        n.cost_from_root + edge_cost(n.state, new_state, params_.w);
    if (cost >= best_cost) return;
    if (!edge_safe(n.state, new_state)) return;
    best_cost = cost;
    best_parent = id;
  };
  consider(nearest_id);
  for (int id : near)
    if (id != nearest_id) consider(id);
  if (best_parent < 0) return std::nullopt;

  const int new_id = static_cast<int>(nodes_.size());
  TreeNode node;
  node.state = new_state;
  node.parent = best_parent;
  node.cost_from_root = best_cost;
  nodes_.push_back(std::move(node));
  nodes_[best_parent].children.push_back(new_id);
  if (is_goal(new_state)) goal_nodes_.push_back(new_id);

  for (int id : near) {
    if (id == new_id || id == best_parent) continue;
    if (nodes_[id].parent < 0) continue;  // never re-parent the root
    try_rewire(new_id, id);
  }
  return new_id;
}

STState StRrtStar::draw_sample() {
  if (rng_.uniform() < params_.goal_bias) {
    // Goal-biased draws carry the start time so steer assigns the tight
    // feasible arrival instead of a random one.
    return STState(goal_pos_, start_.time);
  }
  double best = c_best();
  if (std::isfinite(best))
    best = std::max(best, c_min_ * (1.0 + 1e-9));
  return sample_informed(start_, goal_pos_, best, bounds_, params_.w, rng_,
                         fallback_horizon_);
}

// Walk the root path of `goal_node`, returning the deepest node whose
// incoming edge fails feasibility or safety; -1 when the path is clean.
int StRrtStar::first_invalid_on_path(int goal_node) const {
  int failing = -1;
  for (int id = goal_node; nodes_[id].parent >= 0; id = nodes_[id].parent) {
    const TreeNode &n = nodes_[id];
    if (!is_admissible(nodes_[n.parent].state, n.state, params_.v_max) ||
        !edge_safe(nodes_[n.parent].state, n.state))
      failing = id;
  }
  return failing;
}

PlanResult StRrtStar::harvest() {
  PlanResult result;
  result.tree_size = nodes_.size();

  std::vector<int> candidates;
  for (int id : goal_nodes_)
    if (nodes_[id].valid) candidates.push_back(id);
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    if (nodes_[a].cost_from_root != nodes_[b].cost_from_root)
      return nodes_[a].cost_from_root < nodes_[b].cost_from_root;
    return a < b;
  });

  for (int goal_id : candidates) {
    if (!nodes_[goal_id].valid) continue;
    const int failing = first_invalid_on_path(goal_id);
    if (failing >= 0) {
      invalidate_subtree(failing);
      continue;
    }
    std::vector<STState> path;
    for (int id = goal_id; id >= 0; id = nodes_[id].parent)
      path.push_back(nodes_[id].state);
    std::reverse(path.begin(), path.end());
    result.path = std::move(path);
    result.c_best = nodes_[goal_id].cost_from_root;
    result.status = PlanStatus::found;
    return result;
  }
  result.status = PlanStatus::not_found_within_budget;
  return result;
}

PlanResult StRrtStar::plan(const STState &start, const Vec3 &goal_pos,
                           int iterations) {
  start_ = start;
  goal_pos_ = goal_pos;
  c_min_ = (goal_pos - start.position).norm();
  fallback_horizon_ = std::max(4.0 * c_min_ / params_.v_max, 2.0);
  nodes_.clear();
  goal_nodes_.clear();
  planned_ = true;

  if (!state_safe(start)) {
    PlanResult result;
    result.status = PlanStatus::not_found_within_budget;
    result.diagnostic = "start state unsafe";
    return result;
  }

  TreeNode root;
  root.state = start;
  nodes_.push_back(root);
  if (is_goal(start)) goal_nodes_.push_back(0);

  for (int i = 0; i < iterations; ++i) extend(draw_sample());
  return harvest();
}

PlanResult StRrtStar::refine(int iterations) {
  if (!planned_) throw std::logic_error("refine: no prior plan() call");
  if (nodes_.empty() || !nodes_[0].valid) {
    PlanResult result;
    result.diagnostic = "tree root invalid";
    return result;
  }
  for (int i = 0; i < iterations; ++i) extend(draw_sample());
  return harvest();
}

}  // namespace spot
