#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>
#include <vector>

#include "meshforge/core/aabb.h"

namespace meshforge {

// Indexed triangle mesh. Normals are per position-vertex; UVs live in a
// separate pool indexed per corner (faceUvs parallel to faces) so seams can
// reference one 3D vertex from several charts.
struct TriangleMesh {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3i> faces;
  std::vector<Eigen::Vector3d> normals;   // optional, size 0 or positions.size()
  std::vector<Eigen::Vector2d> uvs;       // optional pool
  std::vector<Eigen::Vector3i> faceUvs;   // optional, size 0 or faces.size()

  int vertexCount() const { return static_cast<int>(positions.size()); }
  int faceCount() const { return static_cast<int>(faces.size()); }
  bool hasNormals() const { return normals.size() == positions.size() && !positions.empty(); }
  bool hasUvs() const { return faceUvs.size() == faces.size() && !uvs.empty(); }
};

inline Eigen::Vector3d faceAreaVector(const TriangleMesh& m, int f) {
  const auto& t = m.faces[f];
  return 0.5 * (m.positions[t[1]] - m.positions[t[0]]).cross(m.positions[t[2]] - m.positions[t[0]]);
}

inline double faceArea(const TriangleMesh& m, int f) { return faceAreaVector(m, f).norm(); }

// Unit geometric normal; zero vector for degenerate faces.
inline Eigen::Vector3d faceNormal(const TriangleMesh& m, int f) {
  Eigen::Vector3d n = faceAreaVector(m, f);
  double len = n.norm();
  return len > 0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
}

Aabb3d bounds(const TriangleMesh& m);
double surfaceArea(const TriangleMesh& m);

// Area-weighted per-vertex normals, normalized (zero stays zero).
std::vector<Eigen::Vector3d> computeVertexNormals(const TriangleMesh& m);

// Throws InvalidGeometry on NaN/Inf coordinates, EmptyMesh when no faces.
void validateMesh(const TriangleMesh& m);

// Uniform scale + translation putting the mesh inside the sphere of the given
// radius centered at the origin. Returns the applied scale.
double normalizeToSphere(TriangleMesh& m, double radius = 0.5);

// Scales both meshes by one shared transform mapping the union bounding box
// into the unit cube.
void normalizePairToUnitCube(TriangleMesh& a, TriangleMesh& b);

struct ManifoldReport {
  bool closed = false;             // every edge has exactly 2 incident faces
  bool orientable = false;         // the 2 incidences traverse the edge oppositely
  std::int64_t eulerCharacteristic = 0;  // V - E + F over referenced vertices
  int boundaryEdges = 0;
  int nonManifoldEdges = 0;        // edges with > 2 incident faces

  bool closedManifold() const { return closed && orientable; }
};

ManifoldReport checkClosedManifold(const TriangleMesh& m);

// Per-face edge-adjacent neighbor face indices (-1 where no neighbor exists,
// deterministic pairing; edges with > 2 faces pair in face order).
std::vector<std::array<int, 3>> faceAdjacency(const TriangleMesh& m);

// Flags vertices lying on any edge whose incident-face count is not 2, i.e.
// open rims and non-manifold fans alike.
std::vector<std::uint8_t> boundaryVertices(const TriangleMesh& m);

// Sorted-pair edge key for hashing.
inline std::uint64_t edgeKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Drops faces not flagged keep, then drops unreferenced vertices. Face and
// vertex order preserved. Remaps normals/uv corners alongside.
TriangleMesh extractFaces(const TriangleMesh& m, const std::vector<std::uint8_t>& keep);

}  // namespace meshforge
