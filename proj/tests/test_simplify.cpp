#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "meshforge/core/error.h"
#include "meshforge/core/mesh.h"
#include "meshforge/core/rng.h"
#include "meshforge/simplify/simplify.h"
#include "meshforge/spatial/bvh.h"
#include "support/fixtures.h"

using namespace meshforge;

namespace {

// Mean distance from area-weighted random samples on `from` to the surface of
// `to`. Symmetrize at the call site.
double meanSurfaceDistance(const TriangleMesh& from, const Bvh& toBvh, int samples,
                           std::uint64_t seed) {
  std::vector<double> cumulative(from.faceCount());
  double total = 0;
  for (int f = 0; f < from.faceCount(); ++f) {
    total += faceArea(from, f);
    cumulative[f] = total;
  }
  CounterRng rng(seed);
  double sum = 0;
  for (int i = 0; i < samples; ++i) {
    double r = rng.uniform(3 * i) * total;
    int f = static_cast<int>(std::lower_bound(cumulative.begin(), cumulative.end(), r) -
                             cumulative.begin());
    f = std::min(f, from.faceCount() - 1);
    double su = std::sqrt(rng.uniform(3 * i + 1));
    double v = rng.uniform(3 * i + 2);
    Eigen::Vector3d bary(1.0 - su, su * (1.0 - v), su * v);
    const auto& t = from.faces[f];
    Eigen::Vector3d p = bary[0] * from.positions[t[0]] + bary[1] * from.positions[t[1]] +
                        bary[2] * from.positions[t[2]];
    sum += toBvh.closestPoint(p).distance();
  }
  return sum / samples;
}

double chamfer(const TriangleMesh& a, const TriangleMesh& b, int samples = 20000) {
  Bvh bvhA(a), bvhB(b);
  return 0.5 * (meanSurfaceDistance(a, bvhB, samples, 11) +
                meanSurfaceDistance(b, bvhA, samples, 12));
}

double maxSurfaceDistance(const TriangleMesh& from, const Bvh& toBvh, int samples,
                          std::uint64_t seed) {
  std::vector<double> cumulative(from.faceCount());
  double total = 0;
  for (int f = 0; f < from.faceCount(); ++f) {
    total += faceArea(from, f);
    cumulative[f] = total;
  }
  CounterRng rng(seed);
  double worst = 0;
  for (int i = 0; i < samples; ++i) {
    double r = rng.uniform(3 * i) * total;
    int f = static_cast<int>(std::lower_bound(cumulative.begin(), cumulative.end(), r) -
                             cumulative.begin());
    f = std::min(f, from.faceCount() - 1);
    double su = std::sqrt(rng.uniform(3 * i + 1));
    double v = rng.uniform(3 * i + 2);
    Eigen::Vector3d bary(1.0 - su, su * (1.0 - v), su * v);
    const auto& t = from.faces[f];
    Eigen::Vector3d p = bary[0] * from.positions[t[0]] + bary[1] * from.positions[t[1]] +
                        bary[2] * from.positions[t[2]];
    worst = std::max(worst, toBvh.closestPoint(p).distance());
  }
  return worst;
}

double meshSignedVolume(const TriangleMesh& m) {
  double vol = 0;
  for (const auto& t : m.faces)
    vol += m.positions[t[0]].dot(m.positions[t[1]].cross(m.positions[t[2]])) / 6.0;
  return vol;
}

bool hasDuplicateFaces(const TriangleMesh& m) {
  std::set<std::array<int, 3>> seen;
  for (const auto& t : m.faces) {
    std::array<int, 3> key{t[0], t[1], t[2]};
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) return true;
  }
  return false;
}

int countOverfullEdges(const TriangleMesh& m) {
  std::vector<std::uint64_t> keys;
  for (const auto& t : m.faces)
    for (int k = 0; k < 3; ++k) keys.push_back(edgeKey(t[k], t[(k + 1) % 3]));
  std::sort(keys.begin(), keys.end());
  int overfull = 0;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    if (j - i > 2) ++overfull;
    i = j;
  }
  return overfull;
}

// Random positive semidefinite quadric from `planes` random planes.
Quadric randomQuadric(CounterRng& rng, std::uint64_t base, int planes) {
  Quadric q;
  for (int k = 0; k < planes; ++k) {
    std::uint64_t at = base + 8 * k;
    Eigen::Vector3d n(rng.uniform(at) - 0.5, rng.uniform(at + 1) - 0.5, rng.uniform(at + 2) - 0.5);
    if (n.norm() < 1e-3) n = Eigen::Vector3d(1, 0, 0);
    n.normalize();
    double d = 2.0 * rng.uniform(at + 3) - 1.0;
    double w = 0.05 + 2.0 * rng.uniform(at + 4);
    q += Quadric::fromPlane(n, d, w);
  }
  return q;
}

bool samePositionsAndFaces(const TriangleMesh& a, const TriangleMesh& b) {
  if (a.positions.size() != b.positions.size() || a.faces.size() != b.faces.size()) return false;
  for (std::size_t i = 0; i < a.positions.size(); ++i)
    if (a.positions[i] != b.positions[i]) return false;
  for (std::size_t i = 0; i < a.faces.size(); ++i)
    if (a.faces[i] != b.faces[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("plane quadrics vanish exactly on their planes") {
  TriangleMesh square = fixtures::planeGrid(1, 1);
  auto q = initQuadrics(square);
  CounterRng rng(5);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d inPlane(rng.uniform(3 * i) * 4 - 2, rng.uniform(3 * i + 1) * 4 - 2, 0.0);
    for (const auto& quad : q) CHECK(std::abs(quad.evaluate(inPlane)) < 1e-12);
    Eigen::Vector3d off = inPlane + Eigen::Vector3d(0, 0, 0.5 + rng.uniform(3 * i + 2));
    CHECK(q[0].evaluate(off) > 1e-3);
  }
}

TEST_CASE("cube corner quadric vanishes only at the corner") {
  TriangleMesh cube = fixtures::box({0.5, 0.5, 0.5}, 1);
  auto q = initQuadrics(cube);
  int corner = -1;
  for (int v = 0; v < cube.vertexCount(); ++v)
    if ((cube.positions[v] - Eigen::Vector3d(0.5, 0.5, 0.5)).norm() < 1e-12) corner = v;
  REQUIRE(corner >= 0);
  CHECK(std::abs(q[corner].evaluate(cube.positions[corner])) < 1e-12);
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Vector3d off = cube.positions[corner];
    off[axis] += 0.1;
    CHECK(q[corner].evaluate(off) > 1e-4);
    off[axis] -= 0.2;
    CHECK(q[corner].evaluate(off) > 1e-4);
  }
}

TEST_CASE("every original vertex has zero error under its own quadric") {
  TriangleMesh blob = fixtures::starBlob(3, 24, 24);
  auto q = initQuadrics(blob);
  for (int v = 0; v < blob.vertexCount(); ++v)
    CHECK(std::abs(q[v].evaluate(blob.positions[v])) < 1e-9);
  // Positive semidefinite up to rounding anywhere.
  auto points = fixtures::randomPointsInBox(500, {{-2, -2, -2}, {2, 2, 2}}, 9);
  for (const auto& p : points) CHECK(q[p.x() > 0 ? 0 : 1].evaluate(p) > -1e-9);
}

TEST_CASE("contraction placement is the exact minimizer over the segment") {
  CounterRng rng(77);
  int optimalSeen = 0, clampedSeen = 0, midpointSeen = 0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    std::uint64_t base = 1000 + static_cast<std::uint64_t>(trial) * 64;
    int planes0 = 1 + static_cast<int>(rng.below(base, 4));
    int planes1 = 1 + static_cast<int>(rng.below(base + 1, 4));
    Quadric q0 = randomQuadric(rng, base + 2, planes0);
    Quadric q1 = randomQuadric(rng, base + 34, planes1);
    Eigen::Vector3d v0(rng.uniform(base + 60) * 2 - 1, rng.uniform(base + 61) * 2 - 1,
                       rng.uniform(base + 62) * 2 - 1);
    Eigen::Vector3d v1 = v0 + Eigen::Vector3d(rng.uniform(base + 56) * 2 - 1,
                                              rng.uniform(base + 57) * 2 - 1,
                                              rng.uniform(base + 58) * 2 - 1);
    if ((v1 - v0).norm() < 1e-6) continue;

    CollapseCandidate cand = placeContraction(q0, q1, v0, v1, false, false);
    Quadric merged = q0 + q1;

    // Stored cost is E at the stored target.
    CHECK(std::abs(merged.evaluate(cand.target) - cand.cost) < 1e-9);
    CHECK(cand.cost >= 0.0);
    // Midpoint is always feasible, so the optimal cost never exceeds it.
    CHECK(cand.cost <= merged.evaluate(0.5 * (v0 + v1)) + 1e-9);
    // The target stays on the segment.
    Eigen::Vector3d e = v1 - v0;
    double t = (cand.target - v0).dot(e) / e.squaredNorm();
    CHECK(t >= -1e-9);
    CHECK(t <= 1 + 1e-9);
    CHECK((cand.target - (v0 + t * e)).norm() < 1e-9);

    if (cand.kind == PlacementKind::Midpoint) {
      ++midpointSeen;
      continue;  // singular fallback is not the 1-D minimizer by design
    }
    if (cand.kind == PlacementKind::OptimalInterior) ++optimalSeen;
    if (cand.kind == PlacementKind::ClampedEdge) ++clampedSeen;

    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10000; ++k) {
      Eigen::Vector3d p = v0 + (k / 10000.0) * e;
      best = std::min(best, merged.evaluate(p));
    }
    CHECK(cand.cost <= best + 1e-9);
  }
  // All three interior branches must actually be exercised.
  CHECK(optimalSeen > 1000);
  CHECK(clampedSeen > 1000);
  CHECK(midpointSeen > 500);
}

TEST_CASE("placement picks the advertised branch in hand-built cases") {
  auto plane = [](double nx, double ny, double nz, double d, double w) {
    return Quadric::fromPlane(Eigen::Vector3d(nx, ny, nz).normalized(), d, w);
  };
  Eigen::Vector3d v0(0, 0, 0), v1(1, 0, 0);

  SUBCASE("optimum past the segment clamps to the endpoint") {
    Quadric q0 = plane(1, 0, 0, -3, 1) + plane(0, 1, 0, 0, 1);
    Quadric q1 = plane(0, 0, 1, 0, 1);
    auto cand = placeContraction(q0, q1, v0, v1, false, false);
    CHECK(cand.kind == PlacementKind::ClampedEdge);
    CHECK((cand.target - v1).norm() < 1e-12);
    CHECK(cand.cost == doctest::Approx(4.0).epsilon(1e-9));
  }
  SUBCASE("optimum inside the segment is used directly") {
    Quadric q0 = plane(1, 0, 0, -0.25, 1) + plane(0, 1, 0, 0, 1);
    Quadric q1 = plane(0, 0, 1, 0, 1);
    auto cand = placeContraction(q0, q1, v0, v1, false, false);
    CHECK(cand.kind == PlacementKind::OptimalInterior);
    CHECK((cand.target - Eigen::Vector3d(0.25, 0, 0)).norm() < 1e-9);
    CHECK(cand.cost < 1e-12);
  }
  SUBCASE("flat geometry falls back to the midpoint at zero cost") {
    Quadric q0 = plane(0, 0, 1, 0, 1) + plane(0, 0, 1, 0, 0.5);
    Quadric q1 = plane(0, 0, 1, 0, 2);
    auto cand = placeContraction(q0, q1, v0, v1, false, false);
    CHECK(cand.kind == PlacementKind::Midpoint);
    CHECK((cand.target - Eigen::Vector3d(0.5, 0, 0)).norm() < 1e-12);
    CHECK(cand.cost < 1e-12);
  }
  SUBCASE("pivot ratio controls the singularity fallback") {
    Quadric base = plane(1, 0, 0, 0, 1) + plane(0, 1, 0, 0, 1);
    auto nearSingular = placeContraction(base + plane(0, 0, 1, 0, 1e-13), Quadric{}, v0, v1,
                                         false, false);
    CHECK(nearSingular.kind == PlacementKind::Midpoint);
    auto comfortably = placeContraction(base + plane(0, 0, 1, 0, 1e-10), Quadric{}, v0, v1,
                                        false, false);
    CHECK(comfortably.kind != PlacementKind::Midpoint);
  }
  SUBCASE("boundary edges take the lower-error endpoint") {
    Quadric q0 = plane(1, 0, 0, 0, 1);  // zero at v0, 1 at v1
    auto cand = placeContraction(q0, Quadric{}, v0, v1, true, false);
    CHECK(cand.kind == PlacementKind::Endpoint);
    CHECK(cand.target == v0);
    CHECK(cand.cost < 1e-12);
  }
  SUBCASE("locked boundaries pin the boundary endpoint or refuse") {
    auto mixed = placeContraction(plane(1, 0, 0, 0, 1), Quadric{}, v0, v1, false, true,
                                  Placement::Optimal, true);
    CHECK(mixed.kind == PlacementKind::BoundaryFixed);
    CHECK(mixed.target == v1);
    CHECK(mixed.feasible);
    auto both = placeContraction(Quadric{}, Quadric{}, v0, v1, true, true, Placement::Optimal,
                                 true);
    CHECK_FALSE(both.feasible);
  }
}

TEST_CASE("optimal placement never costs more than midpoint placement") {
  TriangleMesh mesh = fixtures::starBlob(21, 40, 40);
  fixtures::removeFaces(mesh, {0, 1, 2, 3, 4, 5, 6, 7});  // some boundary too
  auto quadrics = initQuadrics(mesh);
  addBoundaryConstraints(mesh, quadrics);
  auto onBoundary = boundaryVertices(mesh);

  std::set<std::uint64_t> edges;
  for (const auto& t : mesh.faces)
    for (int k = 0; k < 3; ++k) edges.insert(edgeKey(t[k], t[(k + 1) % 3]));
  for (std::uint64_t key : edges) {
    int a = static_cast<int>(key >> 32);
    int b = static_cast<int>(key & 0xffffffffu);
    auto opt = placeContraction(quadrics[a], quadrics[b], mesh.positions[a], mesh.positions[b],
                                onBoundary[a] != 0, onBoundary[b] != 0, Placement::Optimal);
    auto mid = placeContraction(quadrics[a], quadrics[b], mesh.positions[a], mesh.positions[b],
                                onBoundary[a] != 0, onBoundary[b] != 0, Placement::Midpoint);
    CHECK(opt.cost <= mid.cost + 1e-12);
  }
}

TEST_CASE("simplified icosphere keeps its shape better with optimal placement") {
  TriangleMesh dense = fixtures::icosphere(5);  // 20480 faces
  REQUIRE(dense.faceCount() == 20480);

  SimplifyOptions optimal;
  optimal.targetFaces = 5000;
  SimplifyOptions midpoint = optimal;
  midpoint.placement = Placement::Midpoint;

  SimplifyResult opt = simplifyMesh(dense, optimal);
  SimplifyResult mid = simplifyMesh(dense, midpoint);

  for (const SimplifyResult* r : {&opt, &mid}) {
    CHECK(r->reachedTarget);
    CHECK(r->mesh.faceCount() <= 5000);
    CHECK(r->mesh.faceCount() >= 4998);
    ManifoldReport report = checkClosedManifold(r->mesh);
    CHECK(report.closedManifold());
    CHECK(report.eulerCharacteristic == 2);
    CHECK_FALSE(hasDuplicateFaces(r->mesh));
    for (int f = 0; f < r->mesh.faceCount(); ++f) CHECK(faceArea(r->mesh, f) >= 1e-12);
    // Orientation preserved: volume close to the ball it approximates.
    double vol = meshSignedVolume(r->mesh);
    CHECK(vol > 0.85 * (4.0 / 3.0) * M_PI * 0.125);
    CHECK(vol < 1.05 * (4.0 / 3.0) * M_PI * 0.125);
  }
  CHECK(opt.kindCounts[static_cast<int>(PlacementKind::OptimalInterior)] > 0);
  CHECK(mid.kindCounts[static_cast<int>(PlacementKind::Midpoint)] == mid.collapses);

  double chamferOpt = chamfer(opt.mesh, dense);
  double chamferMid = chamfer(mid.mesh, dense);
  CHECK(chamferOpt < chamferMid);
}

TEST_CASE("planar grid collapses onto the same plane with a preserved rim") {
  TriangleMesh grid = fixtures::planeGrid(71, 71);
  REQUIRE(grid.faceCount() == 10082);
  SimplifyOptions options;
  options.targetFaces = 100;
  SimplifyResult result = simplifyMesh(grid, options);

  CHECK(result.reachedTarget);
  CHECK(result.mesh.faceCount() <= 100);
  CHECK(result.mesh.faceCount() >= 98);
  for (const auto& p : result.mesh.positions) CHECK(std::abs(p.z()) < 1e-12);
  double zsign = faceNormal(grid, 0).z() > 0 ? 1.0 : -1.0;
  for (int f = 0; f < result.mesh.faceCount(); ++f)
    CHECK(faceNormal(result.mesh, f).z() * zsign > 0.0);  // nothing flipped in-plane

  // Two-sided Hausdorff stays tiny: the output still covers the square.
  Bvh bvhIn(grid), bvhOut(result.mesh);
  CHECK(maxSurfaceDistance(grid, bvhOut, 4000, 31) < 1e-6);
  CHECK(maxSurfaceDistance(result.mesh, bvhIn, 4000, 32) < 1e-6);
  Aabb3d boxIn = bounds(grid), boxOut = bounds(result.mesh);
  CHECK((boxIn.min - boxOut.min).norm() < 1e-12);
  CHECK((boxIn.max - boxOut.max).norm() < 1e-12);
}

TEST_CASE("locked boundaries keep every rim vertex in place") {
  TriangleMesh grid = fixtures::planeGrid(21, 21);
  SimplifyOptions options;
  options.targetFaces = 200;
  options.lockBoundary = true;
  SimplifyResult result = simplifyMesh(grid, options);
  CHECK(result.reachedTarget);
  CHECK(result.kindCounts[static_cast<int>(PlacementKind::Endpoint)] == 0);

  std::set<std::array<double, 3>> rimIn;
  auto flagsIn = boundaryVertices(grid);
  for (int v = 0; v < grid.vertexCount(); ++v)
    if (flagsIn[v])
      rimIn.insert({grid.positions[v].x(), grid.positions[v].y(), grid.positions[v].z()});
  auto flagsOut = boundaryVertices(result.mesh);
  int rimOut = 0;
  for (int v = 0; v < result.mesh.vertexCount(); ++v) {
    if (!flagsOut[v]) continue;
    ++rimOut;
    const auto& p = result.mesh.positions[v];
    CHECK(rimIn.count({p.x(), p.y(), p.z()}) == 1);
  }
  CHECK(rimOut == static_cast<int>(rimIn.size()));  // rim edges cannot collapse
}

TEST_CASE("a target at or above the current face count is the identity") {
  TriangleMesh sphere = fixtures::icosphere(2);
  sphere.normals = computeVertexNormals(sphere);

  SimplifyOptions equal;
  equal.targetFaces = sphere.faceCount();
  SimplifyResult same = simplifyMesh(sphere, equal);
  CHECK(samePositionsAndFaces(same.mesh, sphere));
  CHECK(same.mesh.normals == sphere.normals);
  CHECK(same.collapses == 0);
  CHECK(same.reachedTarget);

  SimplifyOptions above;
  above.targetFaces = sphere.faceCount() * 2;
  CHECK(samePositionsAndFaces(simplifyMesh(sphere, above).mesh, sphere));
}

TEST_CASE("simplification is deterministic") {
  TriangleMesh blob = fixtures::starBlob(7, 60, 60);
  SimplifyOptions options;
  options.targetFaces = 1500;
  SimplifyResult first = simplifyMesh(blob, options);
  SimplifyResult second = simplifyMesh(fixtures::starBlob(7, 60, 60), options);
  CHECK(first.mesh.faceCount() <= 1500);
  CHECK(samePositionsAndFaces(first.mesh, second.mesh));
  CHECK(first.collapses == second.collapses);
  CHECK(first.rounds == second.rounds);
}

TEST_CASE("an octahedron reduces to a tetrahedron and stops") {
  TriangleMesh octa;
  octa.positions = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  octa.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  REQUIRE(checkClosedManifold(octa).closedManifold());

  SimplifyOptions options;
  options.targetFaces = 4;
  SimplifyResult result = simplifyMesh(octa, options);
  CHECK(result.reachedTarget);
  CHECK(result.mesh.faceCount() == 4);
  ManifoldReport report = checkClosedManifold(result.mesh);
  CHECK(report.closedManifold());
  CHECK(report.eulerCharacteristic == 2);
}

TEST_CASE("disjoint tetrahedra cannot go below four faces each") {
  TriangleMesh tet;
  tet.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  tet.faces = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}};
  REQUIRE(checkClosedManifold(tet).closedManifold());
  TriangleMesh moved = tet;
  fixtures::transformMesh(moved, 1.0, {3, 0, 0});
  TriangleMesh pair = fixtures::concatMeshes(tet, moved);

  SimplifyOptions options;
  options.targetFaces = 4;
  SimplifyResult result = simplifyMesh(pair, options);
  CHECK_FALSE(result.reachedTarget);
  CHECK(result.mesh.faceCount() == 8);
  CHECK(result.collapses == 0);
}

TEST_CASE("non-manifold fans survive simplification without spreading") {
  TriangleMesh grid = fixtures::planeGrid(11, 11);
  // Glue a flap onto an interior edge, making it a 3-face fan.
  int a = -1, b = -1;
  for (const auto& t : grid.faces) {
    for (int k = 0; k < 3; ++k) {
      const auto& p = grid.positions[t[k]];
      const auto& q = grid.positions[t[(k + 1) % 3]];
      bool interior = p.x() > 0.05 && p.x() < 0.95 && p.y() > 0.05 && p.y() < 0.95 &&
                      q.x() > 0.05 && q.x() < 0.95 && q.y() > 0.05 && q.y() < 0.95;
      if (interior && a < 0) {
        a = t[k];
        b = t[(k + 1) % 3];
      }
    }
  }
  REQUIRE(a >= 0);
  int apex = grid.vertexCount();
  grid.positions.push_back(0.5 * (grid.positions[a] + grid.positions[b]) +
                           Eigen::Vector3d(0, 0, 0.3));
  grid.faces.push_back({a, b, apex});
  REQUIRE(countOverfullEdges(grid) == 1);

  SimplifyOptions options;
  options.targetFaces = 60;
  SimplifyResult result = simplifyMesh(grid, options);
  CHECK(result.mesh.faceCount() <= 201);
  CHECK(countOverfullEdges(result.mesh) <= 1);
  CHECK_FALSE(hasDuplicateFaces(result.mesh));
}

TEST_CASE("targets below four faces are rejected") {
  TriangleMesh sphere = fixtures::icosphere(1);
  SimplifyOptions options;
  options.targetFaces = 3;
  CHECK_THROWS_WITH_AS(simplifyMesh(sphere, options), doctest::Contains("targetFaces"),
                       Error);
  try {
    simplifyMesh(sphere, options);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
    CHECK(e.isValidation());
  }
}
