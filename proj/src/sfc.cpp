#include "spot/sfc.hpp"

#include <algorithm>

namespace spot {

std::vector<double> discretize_interval(double t_i, double t_j,
                                        double dt_corridor) {
  if (!(t_j > t_i))
    throw std::invalid_argument("discretize_interval: t_j must exceed t_i");
  if (!(dt_corridor > 0.0))
    throw std::invalid_argument("discretize_interval: dt must be positive");
  const int n = static_cast<int>(std::floor((t_j - t_i) / dt_corridor + 1e-9));
  std::vector<double> times;
  times.reserve(n + 2);
  for (int k = 0; k <= n; ++k)
    times.push_back(std::min(t_i + k * dt_corridor, t_j));
  if (times.back() < t_j - 1e-9) times.push_back(t_j);
  return times;
}

std::vector<Vec3> aggregate_obstacles(const std::vector<Vec3> &statics,
                                      const std::vector<DynamicPoint> &dynamics,
                                      const std::vector<double> &times) {
  if (times.empty())
    throw std::invalid_argument("aggregate_obstacles: empty time set");
  std::vector<Vec3> out;
  out.reserve(statics.size() + dynamics.size() * times.size());
  out.insert(out.end(), statics.begin(), statics.end());
  for (const auto &d : dynamics)
    for (double t : times) out.push_back(predict_obstacle(d, t));
  return out;
}

namespace {

struct Ellipsoid {
  Vec3 center;
  Eigen::Matrix3d rot;   // col 0 along the segment
  Vec3 radii;

  // Level of p in the ellipsoid metric (1 on the surface).
  double level(const Vec3 &p) const {
    const Vec3 local = rot.transpose() * (p - center);
    return (local.array() / radii.array()).matrix().norm();
  }

  // Outward normal of the level set through p.
  Vec3 surface_normal(const Vec3 &p) const {
    const Vec3 local = rot.transpose() * (p - center);
    const Vec3 grad_local =
        (local.array() / (radii.array() * radii.array())).matrix();
    return (rot * grad_local).normalized();
  }
};

Eigen::Matrix3d frame_along(const Vec3 &dir) {
  Eigen::Matrix3d rot;
  rot.col(0) = dir;
  const Vec3 up = std::abs(dir.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(0, 1, 0);
  rot.col(1) = dir.cross(up).normalized();
  rot.col(2) = dir.cross(rot.col(1));
  return rot;
}

constexpr double kShrinkFloor = 1e-6;
constexpr double kBoundaryPad = 1.0 - 1e-9;

}  // namespace

CorridorSegment decompose_segment(const STState &n_i, const STState &n_j,
                                  const std::vector<Vec3> &obstacles,
                                  const AABB &bounds, double inflate) {
  const Vec3 a = n_i.position;
  const Vec3 b = n_j.position;
  const Vec3 mid = 0.5 * (a + b);
  const Vec3 axis = b - a;
  const double half_len = 0.5 * axis.norm();

  Ellipsoid e;
  e.center = mid;
  if (half_len > 1e-9) {
    e.rot = frame_along(axis.normalized());
    e.radii = Vec3(half_len, half_len, half_len);
  } else {
    // Degenerate segment: seed a small ball around the point.
    e.rot = Eigen::Matrix3d::Identity();
    e.radii = Vec3::Constant(std::max(inflate, 0.1));
  }

  // Shrink until no obstacle point lies inside. Segments keep the axial
  // radius fixed so the endpoints stay on the surface; balls shrink all
  // axes together.
  for (const Vec3 &p : obstacles) {
    if (e.level(p) >= 1.0) continue;
    if (half_len > 1e-9) {
      const Vec3 local = e.rot.transpose() * (p - e.center);
      const double axial = std::abs(local.x()) / e.radii.x();
      if (axial >= 1.0) continue;
      const double lateral = std::hypot(local.y(), local.z());
      const double required =
          lateral / std::sqrt(1.0 - axial * axial) * kBoundaryPad;
      if (required < kShrinkFloor)
        throw DecompositionError("obstacle point on the segment");
      if (required < e.radii.y()) e.radii.y() = e.radii.z() = required;
    } else {
      const double required = (p - e.center).norm() * kBoundaryPad;
      if (required < kShrinkFloor)
        throw DecompositionError("obstacle point at the seed point");
      e.radii = Vec3::Constant(required);
    }
  }

  CorridorSegment seg;
  seg.anchor_a = n_i;
  seg.anchor_b = n_j;
  seg.t_entry = n_i.time;
  seg.t_exit = n_j.time;

  // Peel tangent halfspaces off the closest remaining obstacle point
  // until all are excluded. Each plane is pushed inward by `inflate`,
  // capped below the anchors' margin so both stay inside.
  std::vector<Vec3> remaining = obstacles;
  while (!remaining.empty()) {
    std::size_t best = 0;
    double best_level = kInf;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const double l = e.level(remaining[i]);
      if (l < best_level) {
        best_level = l;
        best = i;
      }
    }
    const Vec3 contact = remaining[best];
    Halfspace h;
    h.normal = e.surface_normal(contact);
    const double raw_offset = h.normal.dot(contact);
    const double anchor_margin = std::min(raw_offset - h.normal.dot(a),
                                          raw_offset - h.normal.dot(b));
    const double shift =
        std::max(0.0, std::min(inflate, 0.99 * anchor_margin));
    h.offset = raw_offset - shift;
    seg.halfspaces.push_back(h);

    // The contact point's margin is -shift <= 0, so it always drops out.
    std::vector<Vec3> kept;
    kept.reserve(remaining.size());
    for (const Vec3 &p : remaining)
      if (h.margin(p) > 0.0) kept.push_back(p);
    remaining.swap(kept);
  }

  // Clip to the flight bounds.
  for (int axis_i = 0; axis_i < 3; ++axis_i) {
    Halfspace lo, hi;
    hi.normal = Vec3::Zero();
    hi.normal[axis_i] = 1.0;
    hi.offset = bounds.hi[axis_i];
    lo.normal = Vec3::Zero();
    lo.normal[axis_i] = -1.0;
    lo.offset = -bounds.lo[axis_i];
    seg.halfspaces.push_back(hi);
    seg.halfspaces.push_back(lo);
  }
  return seg;
}

Corridor build_corridor(const std::vector<STState> &path,
                        const std::vector<Vec3> &statics,
                        const std::vector<DynamicPoint> &dynamics,
                        const AABB &bounds, const PlannerParams &params) {
  if (path.size() < 2)
    throw std::invalid_argument("build_corridor: path needs >= 2 states");

  // Split any over-long edge so no segment spans more than the horizon.
  std::vector<STState> states;
  states.push_back(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const STState &prev = path[i - 1];
    const STState &next = path[i];
    const double dt = next.time - prev.time;
    const int pieces = std::max(
        1, static_cast<int>(std::ceil(dt / params.max_segment_horizon - 1e-9)));
    for (int k = 1; k <= pieces; ++k)
      states.push_back(
          interpolate_state(prev, next, static_cast<double>(k) / pieces));
  }

  Corridor corridor;
  corridor.segments.reserve(states.size() - 1);
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    const std::vector<double> times = discretize_interval(
        states[i].time, states[i + 1].time, params.dt_corridor);
    const std::vector<Vec3> cloud =
        aggregate_obstacles(statics, dynamics, times);
    try {
      corridor.segments.push_back(decompose_segment(
          states[i], states[i + 1], cloud, bounds, params.r_min));
    } catch (DecompositionError &err) {
      err.segment_index = static_cast<int>(i);
      throw;
    }
  }
  return corridor;
}

}  // namespace spot
