#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "meshforge/core/mesh.h"

namespace meshforge {

// Orthonormal tangent basis at one face corner. bitangent = normal x tangent,
// pinned; encode and decode must both use this product for consistency.
struct TangentFrame {
  Eigen::Vector3d tangent = Eigen::Vector3d::UnitX();
  Eigen::Vector3d bitangent = Eigen::Vector3d::UnitY();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

// Per-corner tangent frames of a UV-mapped mesh. Face tangents (the world
// direction of increasing u) accumulate per wedge, i.e. per unique
// (position index, uv index) pair, weighted by the corner angle, so chart
// seams keep separate frames while interior wedges smooth. The accumulated
// tangent is Gram-Schmidt projected against the smooth vertex normal; corners
// without a usable tangent (degenerate UVs) fall back to an arbitrary
// perpendicular. Throws InvalidGeometry when the mesh has no UVs.
std::vector<std::array<TangentFrame, 3>> computeWedgeTangents(const TriangleMesh& mesh);

// Deterministic unit vector perpendicular to n (n need not be unit).
Eigen::Vector3d anyPerpendicular(const Eigen::Vector3d& n);

}  // namespace meshforge
