#include "spot/collision.hpp"

#include <algorithm>
#include <numeric>

namespace spot {

StaticIndex::StaticIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  for (const auto &p : points_)
    if (!is_finite(p))
      throw std::invalid_argument("StaticIndex: non-finite point");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(points_.size() * 2 + 1);
  if (!points_.empty()) root_ = build(0, static_cast<int>(points_.size()), 0);
}

int StaticIndex::build(int begin, int end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin == 1) {
    nodes_[id].point = order_[begin];
    return id;
  }
  const int axis = depth % 3;
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void StaticIndex::search(int node, const Vec3 &q, double &best_sq) const {
  const Node &n = nodes_[node];
  if (n.point >= 0) {
    best_sq = std::min(best_sq, (points_[n.point] - q).squaredNorm());
    return;
  }
  const double delta = q[n.axis] - n.split;
  const int near = delta < 0.0 ? n.left : n.right;
  const int far = delta < 0.0 ? n.right : n.left;
  search(near, q, best_sq);
  if (delta * delta < best_sq) search(far, q, best_sq);
}

double StaticIndex::nearest_distance(const Vec3 &q) const {
  if (root_ < 0) return kInf;
  double best_sq = kInf;
  search(root_, q, best_sq);
  return std::sqrt(best_sq);
}

StaticIndex build_static_index(const std::vector<Vec3> &points) {
  return StaticIndex(points);
}

namespace {

// Offsets keep the packed fields non-negative; bin 12 bits, cells 17 bits.
constexpr int kCellOffset = 1 << 16;
constexpr int kBinOffset = 1 << 11;

inline uint64_t splitmix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t TemporalHashGrid::pack_key(int t_bin, int cx, int cy, int cz) {
  const uint64_t b = static_cast<uint64_t>(t_bin + kBinOffset) & 0xfffull;
  const uint64_t x = static_cast<uint64_t>(cx + kCellOffset) & 0x1ffffull;
  const uint64_t y = static_cast<uint64_t>(cy + kCellOffset) & 0x1ffffull;
  const uint64_t z = static_cast<uint64_t>(cz + kCellOffset) & 0x1ffffull;
  // +1 so a packed key is never 0 (0 marks a vacant slot).
  return (b << 51 | x << 34 | y << 17 | z) + 1;
}

TemporalHashGrid::TemporalHashGrid(const std::vector<DynamicPoint> &points,
                                   double dt_grid, double cell_size,
                                   double t_start, double t_end)
    : dt_grid_(dt_grid), cell_size_(cell_size), t_start_(t_start), t_end_(t_end) {
  if (!(dt_grid > 0.0) || !(cell_size > 0.0))
    throw std::invalid_argument("TemporalHashGrid: resolutions must be positive");
  if (t_end < t_start)
    throw std::invalid_argument("TemporalHashGrid: t_end < t_start");

  // floor((t_start + k*dt)/dt) == floor(t_start/dt) + k in real arithmetic;
  // computing it that way keeps the bin lattice immune to float noise.
  const int steps = bins_per_point();
  first_bin_ = static_cast<int>(std::floor(t_start_ / dt_grid_));
  last_bin_ = first_bin_ + steps - 1;

  std::size_t capacity = 16;
  const std::size_t expected = points.size() * static_cast<std::size_t>(steps);
  while (capacity < expected * 2) capacity <<= 1;
  keys_.assign(capacity, 0);
  heads_.assign(capacity, -1);
  entries_.reserve(expected);
  mask_ = capacity - 1;

  for (const auto &dp : points) {
    for (int k = 0; k < steps; ++k) {
      const Vec3 p = dp.position + dp.velocity * (k * dt_grid_);
      insert(pack_key(first_bin_ + k, cell_coord(p.x(), cell_size_),
                      cell_coord(p.y(), cell_size_),
                      cell_coord(p.z(), cell_size_)),
             p);
    }
  }
}

double TemporalHashGrid::bin_time(int t_bin) const {
  return t_start_ + (t_bin - first_bin_) * dt_grid_;
}

int TemporalHashGrid::bins_per_point() const {
  return static_cast<int>(std::floor((t_end_ - t_start_) / dt_grid_)) + 1;
}

void TemporalHashGrid::insert(uint64_t key, const Vec3 &p) {
  std::size_t i = splitmix(key) & mask_;
  while (keys_[i] != 0 && keys_[i] != key) i = (i + 1) & mask_;
  keys_[i] = key;
  entries_.push_back({p, heads_[i]});
  heads_[i] = static_cast<int32_t>(entries_.size() - 1);
}

int TemporalHashGrid::find_slot(uint64_t key) const {
  if (keys_.empty()) return -1;
  std::size_t i = splitmix(key) & mask_;
  while (keys_[i] != 0) {
    if (keys_[i] == key) return static_cast<int>(i);
    i = (i + 1) & mask_;
  }
  return -1;
}

int TemporalHashGrid::nearest_bin(double t) const {
  // Round to nearest with half-way ties down, then clamp to built range.
  const int bin = static_cast<int>(std::ceil(t / dt_grid_ - 0.5));
  return std::clamp(bin, first_bin_, last_bin_);
}

double TemporalHashGrid::query(const STState &q) const {
  if (entries_.empty()) return kInf;
  const int t_bin = nearest_bin(q.time);
  const int cx = cell_coord(q.position.x(), cell_size_);
  const int cy = cell_coord(q.position.y(), cell_size_);
  const int cz = cell_coord(q.position.z(), cell_size_);

  double best_sq = kInf;
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dz = -1; dz <= 1; ++dz) {
        const int slot = find_slot(pack_key(t_bin, cx + dx, cy + dy, cz + dz));
        if (slot < 0) continue;
        for (int32_t e = heads_[slot]; e >= 0; e = entries_[e].next)
          best_sq = std::min(best_sq,
                             (entries_[e].position - q.position).squaredNorm());
      }
  return std::sqrt(best_sq);
}

std::vector<Vec3> TemporalHashGrid::cell_contents(int t_bin, int cx, int cy,
                                                  int cz) const {
  std::vector<Vec3> out;
  const int slot = find_slot(pack_key(t_bin, cx, cy, cz));
  if (slot < 0) return out;
  for (int32_t e = heads_[slot]; e >= 0; e = entries_[e].next)
    out.push_back(entries_[e].position);
  return out;
}

TemporalHashGrid build_temporal_grid(const std::vector<DynamicPoint> &points,
                                     double dt_grid, double cell_size,
                                     double t_start, double t_end) {
  return TemporalHashGrid(points, dt_grid, cell_size, t_start, t_end);
}

}  // namespace spot
