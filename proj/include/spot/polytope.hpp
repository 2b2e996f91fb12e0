#pragma once

#include "spot/sfc.hpp"

#include <vector>

namespace spot {

struct PolytopeError : std::runtime_error {
  explicit PolytopeError(const std::string &what) : std::runtime_error(what) {}
};

// Convex polyhedron as a vertex/face mesh; faces are ordered loops.
struct PolytopeMesh {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;
};

// Intersection of the halfspaces, computed by clipping a large seed box.
// Throws PolytopeError when the intersection is empty or unbounded.
PolytopeMesh clip_halfspaces(const std::vector<Halfspace> &halfspaces);

// Vertex enumeration of a corridor segment's polyhedron. Every returned
// vertex satisfies all halfspaces to 1e-7.
std::vector<Vec3> polytope_vertices(const CorridorSegment &segment);

}  // namespace spot
