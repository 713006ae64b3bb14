#pragma once

#include <vector>

#include "meshforge/core/aabb.h"
#include "meshforge/core/mesh.h"

// Procedural meshes and analytic oracles shared by the test binaries.
namespace meshforge::fixtures {

// Subdivided icosahedron projected to a sphere. subdivisions 0 gives the
// 20-face icosahedron; each level multiplies the face count by 4.
TriangleMesh icosphere(int subdivisions, double radius = 0.5,
                       const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

// Latitude/longitude sphere: stacks >= 2 rows, slices >= 3 columns,
// 2 * slices * (stacks - 1) faces, closed manifold.
TriangleMesh uvSphere(int stacks, int slices, double radius = 0.5,
                      const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

// Torus around the z axis; closed manifold of genus 1.
TriangleMesh torus(int majorSegments, int minorSegments, double majorRadius = 0.35,
                   double minorRadius = 0.15);

// Axis-aligned box centered at the origin, each side an n x n grid.
TriangleMesh box(const Eigen::Vector3d& halfExtents, int n = 1);

// Open rectangle in the z = 0 plane spanning [0,width] x [0,height].
TriangleMesh planeGrid(int nx, int ny, double width = 1.0, double height = 1.0);

// Cylinder along z, centered at the origin. Without caps it is an open tube
// with two boundary loops.
TriangleMesh cylinder(int radialSegments, int heightSegments, double radius, double height,
                      bool capped);

// Star-shaped bumpy sphere with a per-direction analytic radius, so exact
// inside/outside containment is available as an oracle.
TriangleMesh starBlob(std::uint64_t seed, int stacks, int slices, double baseRadius = 0.5,
                      const Eigen::Vector3d& center = Eigen::Vector3d::Zero());
double starBlobRadius(std::uint64_t seed, const Eigen::Vector3d& direction,
                      double baseRadius = 0.5);
bool starBlobContains(std::uint64_t seed, const Eigen::Vector3d& point, double baseRadius = 0.5,
                      const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

// In-place editing helpers.
void removeFaces(TriangleMesh& mesh, const std::vector<int>& faces);
void flipFaces(TriangleMesh& mesh, const std::vector<int>& faces);
void flipRandomFaces(TriangleMesh& mesh, double fraction, std::uint64_t seed);
void transformMesh(TriangleMesh& mesh, double scale, const Eigen::Vector3d& translate);
TriangleMesh concatMeshes(const TriangleMesh& a, const TriangleMesh& b);

// Signed distances to the ideal shapes (negative inside).
double sphereSdf(const Eigen::Vector3d& p, const Eigen::Vector3d& center, double radius);
double boxSdf(const Eigen::Vector3d& p, const Eigen::Vector3d& halfExtents);
double torusSdf(const Eigen::Vector3d& p, double majorRadius, double minorRadius);

// Deterministic sample generators.
std::vector<Eigen::Vector3d> randomPointsInBox(int n, const Aabb3d& box, std::uint64_t seed);
std::vector<Eigen::Vector3d> randomUnitVectors(int n, std::uint64_t seed);

}  // namespace meshforge::fixtures
