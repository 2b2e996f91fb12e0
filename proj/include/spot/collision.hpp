#pragma once

#include "spot/core.hpp"

#include <cstdint>
#include <vector>

namespace spot {

// Exact nearest-neighbor index over the static obstacle points.
// Build once, query from any number of threads.
class StaticIndex {
 public:
  StaticIndex() = default;
  explicit StaticIndex(std::vector<Vec3> points);

  // Exact minimum Euclidean distance to any stored point; +inf when empty.
  double nearest_distance(const Vec3 &q) const;

  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3> &points() const { return points_; }

 private:
  struct Node {
    int axis = 0;
    double split = 0.0;
    int point = -1;     // leaf payload when >= 0
    int left = -1;
    int right = -1;
  };

  int build(int begin, int end, int depth);
  void search(int node, const Vec3 &q, double &best_sq) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Spatio-temporal hash grid over propagated dynamic points: every point
// is advanced under its constant-velocity model to each time on the
// lattice {t_start, t_start+dt, ..., t_end} and binned by
// (floor(t/dt), floor(p/c)). Co-located points accumulate in per-cell
// lists. Storage is a flat open-addressing table keyed by the packed
// (bin, cell) tuple; rebuilds produce a fresh instance.
class TemporalHashGrid {
 public:
  TemporalHashGrid() = default;
  TemporalHashGrid(const std::vector<DynamicPoint> &points, double dt_grid,
                   double cell_size, double t_start, double t_end);

  // Minimum distance from q.position to any propagated point in the 27
  // cells around q within the time bin nearest to q.time; +inf when no
  // neighbor cell is occupied. Bin choice is round-to-nearest with
  // half-way ties rounding down, clamped to the built bin range.
  double query(const STState &q) const;

  bool empty() const { return entries_.empty(); }
  double dt_grid() const { return dt_grid_; }
  double cell_size() const { return cell_size_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  int first_bin() const { return first_bin_; }
  int last_bin() const { return last_bin_; }

  // Bin lattice size per inserted point: floor((t_end-t_start)/dt)+1.
  int bins_per_point() const;

  int nearest_bin(double t) const;

  // Lattice time the given bin's points were propagated to.
  double bin_time(int t_bin) const;

  // Exposed for the structural invariant tests: all stored positions in
  // (bin, cell), empty list when unoccupied.
  std::vector<Vec3> cell_contents(int t_bin, int cx, int cy, int cz) const;

 private:
  struct Entry {
    Vec3 position;
    int32_t next;
  };

  static uint64_t pack_key(int t_bin, int cx, int cy, int cz);
  int find_slot(uint64_t key) const;  // occupied slot or -1
  void insert(uint64_t key, const Vec3 &p);

  double dt_grid_ = 0.1;
  double cell_size_ = 0.5;
  double t_start_ = 0.0;
  double t_end_ = 0.0;
  int first_bin_ = 0;
  int last_bin_ = -1;

  std::vector<uint64_t> keys_;   // table, 0 = vacant
  std::vector<int32_t> heads_;   // table, index into entries_
  std::vector<Entry> entries_;
  uint64_t mask_ = 0;
};

inline int cell_coord(double x, double cell_size) {
  return static_cast<int>(std::floor(x / cell_size));
}

StaticIndex build_static_index(const std::vector<Vec3> &points);

TemporalHashGrid build_temporal_grid(const std::vector<DynamicPoint> &points,
                                     double dt_grid, double cell_size,
                                     double t_start, double t_end);

inline double query_dynamic(const TemporalHashGrid &grid, const STState &q) {
  return grid.query(q);
}

// min(static clearance, dynamic clearance) per the combined margin rule.
inline double safety_margin(const StaticIndex &static_idx,
                            const TemporalHashGrid &grid, const STState &q) {
  return std::min(static_idx.nearest_distance(q.position), grid.query(q));
}

inline bool is_state_safe(const StaticIndex &static_idx,
                          const TemporalHashGrid &grid, const STState &q,
                          double r_min) {
  return safety_margin(static_idx, grid, q) >= r_min;
}

}  // namespace spot
