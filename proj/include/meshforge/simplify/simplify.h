#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>

#include "meshforge/core/mesh.h"
#include "meshforge/simplify/quadric.h"

namespace meshforge {

enum class Placement { Optimal, Midpoint };

enum class PlacementKind : int {
  OptimalInterior,  // unconstrained minimizer projected strictly inside the edge
  ClampedEdge,      // projection clamped to an endpoint of the segment
  Midpoint,         // singular quadric fallback (or Placement::Midpoint)
  Endpoint,         // boundary edge, lower-error endpoint
  BoundaryFixed,    // boundary edge under lockBoundary, target is the boundary vertex
};
inline constexpr int kPlacementKinds = 5;

struct CollapseCandidate {
  int v0 = -1;  // filled by the simplifier; placeContraction leaves them -1
  int v1 = -1;
  double cost = 0.0;
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  PlacementKind kind = PlacementKind::Midpoint;
  bool feasible = true;  // false: collapse forbidden (locked boundary-boundary edge)
};

// Position and cost of collapsing the edge (v0, v1) under the merged quadric
// Q = q0 + q1. Interior edges minimize E over the segment: solve A x = -b for
// the unconstrained optimum, project onto the segment in the A metric
//   t = e' A (x - v0) / e' A e,   e = v1 - v0,
// clamp t to [0, 1]. The clamped t is the exact minimizer of the convex 1-D
// restriction, so the reported cost never exceeds E at any point of the
// segment, midpoint included. Falls back to the midpoint when A is singular
// (LDLT pivot ratio above 1e12 or a nonpositive pivot). Edges touching a
// boundary vertex take the lower-error endpoint, or the boundary endpoint
// when lockBoundary is set (infeasible if both endpoints are boundary).
CollapseCandidate placeContraction(const Quadric& q0, const Quadric& q1,
                                   const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                                   bool v0Boundary, bool v1Boundary,
                                   Placement placement = Placement::Optimal,
                                   bool lockBoundary = false);

struct SimplifyOptions {
  int targetFaces = 4;
  Placement placement = Placement::Optimal;
  bool lockBoundary = false;
};

struct SimplifyResult {
  TriangleMesh mesh;
  bool reachedTarget = true;  // false: vetoes exhausted the candidates early
  int rounds = 0;
  std::int64_t collapses = 0;
  std::array<std::int64_t, kPlacementKinds> kindCounts{};
};

// Iterative edge-collapse decimation. Each round ranks every live edge by
// (cost, vertex pair), greedily accepts a maximal set of collapses whose
// 1-rings are disjoint, and applies them; disjointness makes the apply phase
// order-free, so the result is deterministic for a fixed input and target.
// A collapse is vetoed when it would break the link condition, duplicate a
// face, flip a surviving face's normal past 90 degrees, or shrink one below
// area 1e-12. Interior quadrics accumulate (Q = Q0 + Q1); boundary vertex
// quadrics are re-derived from the current mesh each round. Stops at the
// first round that reaches targetFaces or accepts nothing. Output drops
// normals/UVs (collapses invalidate them) and unreferenced vertices.
// targetFaces >= current face count returns the input unchanged.
// Throws InvalidConfig when targetFaces < 4.
SimplifyResult simplifyMesh(const TriangleMesh& mesh, const SimplifyOptions& options);

}  // namespace meshforge
