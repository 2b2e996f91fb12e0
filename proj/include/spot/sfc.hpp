#pragma once

#include "spot/core.hpp"

#include <vector>

namespace spot {

// The closed halfspace {p : normal . p <= offset}, unit normal.
struct Halfspace {
  Vec3 normal{Vec3::UnitX()};
  double offset{0.0};

  double margin(const Vec3 &p) const { return offset - normal.dot(p); }
  bool contains(const Vec3 &p, double tol = 0.0) const {
    return margin(p) >= -tol;
  }
};

// Convex polyhedron around one path segment, tagged with the segment's
// time interval.
struct CorridorSegment {
  std::vector<Halfspace> halfspaces;
  double t_entry = 0.0;
  double t_exit = 0.0;
  STState anchor_a;
  STState anchor_b;

  bool contains(const Vec3 &p, double tol = 0.0) const {
    for (const auto &h : halfspaces)
      if (!h.contains(p, tol)) return false;
    return true;
  }
  // Worst (smallest) halfspace margin at p; +inf with no halfspaces.
  double margin(const Vec3 &p) const {
    double m = kInf;
    for (const auto &h : halfspaces) m = std::min(m, h.margin(p));
    return m;
  }
};

struct Corridor {
  std::vector<CorridorSegment> segments;
};

struct DecompositionError : std::runtime_error {
  explicit DecompositionError(const std::string &what)
      : std::runtime_error(what) {}
  int segment_index = -1;
};

// Temporal lattice {t_i, t_i+dt, ...} with t_j appended when off-lattice.
std::vector<double> discretize_interval(double t_i, double t_j,
                                        double dt_corridor);

// Effective obstacle set: statics plus every dynamic point propagated to
// each sample time (duplicates permitted).
std::vector<Vec3> aggregate_obstacles(const std::vector<Vec3> &statics,
                                      const std::vector<DynamicPoint> &dynamics,
                                      const std::vector<double> &times);

// Convex free polyhedron around segment a-b: seed ellipsoid on the
// segment, shrink until obstacle-free, then peel tangent halfspaces off
// the closest obstacle points (each offset inward by up to `inflate`,
// capped so the anchors stay inside), finally clip to `bounds`. Throws
// DecompositionError when an endpoint has zero clearance.
CorridorSegment decompose_segment(const STState &n_i, const STState &n_j,
                                  const std::vector<Vec3> &obstacles,
                                  const AABB &bounds, double inflate);

// One polyhedron per consecutive path pair against the pair's aggregated
// obstacle cloud; over-long segments are split first so no segment spans
// more than params.max_segment_horizon seconds.
Corridor build_corridor(const std::vector<STState> &path,
                        const std::vector<Vec3> &statics,
                        const std::vector<DynamicPoint> &dynamics,
                        const AABB &bounds, const PlannerParams &params);

}  // namespace spot
