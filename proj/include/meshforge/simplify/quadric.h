#pragma once

#include <Eigen/Core>
#include <vector>

#include "meshforge/core/mesh.h"

namespace meshforge {

// Squared-distance-to-planes error in expanded form:
//   E(v) = v'Av + 2 b'v + c
// which is the homogeneous 4x4 form [v;1]' Q [v;1] with Q = [[A, b], [b', c]].
// Sums of plane quadrics keep A symmetric positive semidefinite, so E >= 0 up
// to rounding.
struct Quadric {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double c = 0.0;

  double evaluate(const Eigen::Vector3d& v) const { return v.dot(A * v) + 2.0 * b.dot(v) + c; }

  Quadric& operator+=(const Quadric& o) {
    A += o.A;
    b += o.b;
    c += o.c;
    return *this;
  }
  friend Quadric operator+(Quadric lhs, const Quadric& rhs) { return lhs += rhs; }

  // weight * squared distance to the plane {v : n.v + d = 0}, n unit length.
  static Quadric fromPlane(const Eigen::Vector3d& n, double d, double weight) {
    Quadric q;
    q.A = weight * (n * n.transpose());
    q.b = (weight * d) * n;
    q.c = weight * d * d;
    return q;
  }
};

// Per-vertex sum of area-weighted plane quadrics of the incident faces.
// Degenerate faces contribute nothing. E(v_i) = 0 at every original vertex.
std::vector<Quadric> initQuadrics(const TriangleMesh& mesh);

// Adds, for every edge whose incident-face count is not 2, one constraint
// quadric per incident face to both endpoints: the plane through the edge
// perpendicular to that face, weighted by the squared edge length. Penalizes
// placements that pull an open rim sideways while staying free along it.
void addBoundaryConstraints(const TriangleMesh& mesh, std::vector<Quadric>& quadrics);

}  // namespace meshforge
