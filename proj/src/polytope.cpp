#include "spot/polytope.hpp"

#include <algorithm>
#include <map>

namespace spot {

namespace {

constexpr double kSeedHalfExtent = 1e6;
constexpr double kInsideTol = 1e-9;
constexpr double kOnPlaneTol = 1e-7;

PolytopeMesh seed_box(double half_extent) {
  PolytopeMesh mesh;
  for (int i = 0; i < 8; ++i)
    mesh.vertices.push_back(half_extent * Vec3(i & 1 ? 1 : -1, i & 2 ? 1 : -1,
                                               i & 4 ? 1 : -1));
  mesh.faces = {{0, 2, 6, 4}, {1, 5, 7, 3}, {0, 4, 5, 1},
                {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 6, 7, 5}};
  return mesh;
}

// Sutherland-Hodgman in 3D on the face lattice. Crossing points are
// created once per cut edge and shared between the faces and the cap.
void clip_mesh(PolytopeMesh &mesh, const Halfspace &h) {
  std::vector<double> margin(mesh.vertices.size());
  bool any_outside = false;
  bool all_outside = true;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    margin[i] = h.margin(mesh.vertices[i]);
    if (margin[i] < -kInsideTol)
      any_outside = true;
    else
      all_outside = false;
  }
  if (!any_outside) return;
  if (all_outside) throw PolytopeError("empty halfspace intersection");

  auto inside = [&](int v) { return margin[v] >= -kInsideTol; };
  std::map<std::pair<int, int>, int> crossings;
  auto crossing = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = crossings.find(key);
    if (it != crossings.end()) return it->second;
    const double t = margin[a] / (margin[a] - margin[b]);
    mesh.vertices.push_back(mesh.vertices[a] +
                            t * (mesh.vertices[b] - mesh.vertices[a]));
    margin.push_back(0.0);
    const int id = static_cast<int>(mesh.vertices.size()) - 1;
    crossings.emplace(key, id);
    return id;
  };

  std::vector<std::vector<int>> new_faces;
  for (const auto &face : mesh.faces) {
    std::vector<int> out;
    for (std::size_t k = 0; k < face.size(); ++k) {
      const int s = face[k];
      const int e = face[(k + 1) % face.size()];
      if (inside(s)) {
        if (inside(e)) {
          out.push_back(e);
        } else {
          if (margin[s] > kInsideTol) out.push_back(crossing(s, e));
        }
      } else if (inside(e)) {
        if (margin[e] > kInsideTol) out.push_back(crossing(s, e));
        out.push_back(e);
      }
    }
    // Collapse consecutive duplicates left by on-plane vertices.
    std::vector<int> dedup;
    for (int v : out)
      if (dedup.empty() || (v != dedup.back() && v != dedup.front()))
        dedup.push_back(v);
    if (dedup.size() >= 3) new_faces.push_back(std::move(dedup));
  }

  // Cap: every surviving vertex on the cut plane, ordered angularly.
  std::vector<char> used(mesh.vertices.size(), 0);
  for (const auto &face : new_faces)
    for (int v : face) used[v] = 1;
  std::vector<int> cap;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    if (used[i] && std::abs(margin[i]) <= kOnPlaneTol)
      cap.push_back(static_cast<int>(i));
  if (cap.size() >= 3) {
    Vec3 centroid = Vec3::Zero();
    for (int v : cap) centroid += mesh.vertices[v];
    centroid /= static_cast<double>(cap.size());
    const Vec3 u = (mesh.vertices[cap[0]] - centroid).normalized();
    const Vec3 w = h.normal.cross(u);
    std::sort(cap.begin(), cap.end(), [&](int p, int q) {
      const Vec3 dp = mesh.vertices[p] - centroid;
      const Vec3 dq = mesh.vertices[q] - centroid;
      return std::atan2(w.dot(dp), u.dot(dp)) <
             std::atan2(w.dot(dq), u.dot(dq));
    });
    new_faces.push_back(std::move(cap));
  }

  if (new_faces.empty()) throw PolytopeError("empty halfspace intersection");

  // Compact unused vertices.
  std::vector<int> remap(mesh.vertices.size(), -1);
  PolytopeMesh compacted;
  for (auto &face : new_faces) {
    for (int &v : face) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(compacted.vertices.size());
        compacted.vertices.push_back(mesh.vertices[v]);
      }
      v = remap[v];
    }
    compacted.faces.push_back(std::move(face));
  }
  mesh = std::move(compacted);
}

}  // namespace

PolytopeMesh clip_halfspaces(const std::vector<Halfspace> &halfspaces) {
  PolytopeMesh mesh = seed_box(kSeedHalfExtent);
  for (const auto &h : halfspaces) clip_mesh(mesh, h);
  for (const auto &v : mesh.vertices)
    if (v.cwiseAbs().maxCoeff() >= 0.9 * kSeedHalfExtent)
      throw PolytopeError("unbounded halfspace intersection");
  return mesh;
}

std::vector<Vec3> polytope_vertices(const CorridorSegment &segment) {
  const PolytopeMesh mesh = clip_halfspaces(segment.halfspaces);
  // Merge near-coincident vertices produced by nearly-parallel cuts.
  std::vector<Vec3> out;
  for (const auto &v : mesh.vertices) {
    bool dup = false;
    for (const auto &u : out)
      if ((u - v).norm() < 1e-9) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(v);
  }
  if (out.empty()) throw PolytopeError("empty polytope");
  return out;
}

}  // namespace spot
