#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "meshforge/core/error.h"
#include "meshforge/core/rng.h"
#include "meshforge/spatial/bvh.h"
#include "meshforge/spatial/tri_geom.h"
#include "support/fixtures.h"

using namespace meshforge;

namespace {

// Independent ray/triangle reference: plane intersection followed by a
// barycentric solve with edge dot products. Used to cross-check the
// production intersector with a different formulation.
bool rayTrianglePlaneBary(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                          const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                          const Eigen::Vector3d& c, double& t, double& u, double& v) {
  Eigen::Vector3d n = (b - a).cross(c - a);
  double denom = n.dot(d);
  if (std::abs(denom) < 1e-14) return false;
  t = n.dot(a - o) / denom;
  Eigen::Vector3d h = o + t * d;
  Eigen::Vector3d v0 = b - a, v1 = c - a, v2 = h - a;
  double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  double d20 = v2.dot(v0), d21 = v2.dot(v1);
  double det = d00 * d11 - d01 * d01;
  u = (d11 * d20 - d01 * d21) / det;
  v = (d00 * d21 - d01 * d20) / det;
  return u >= 0 && v >= 0 && u + v <= 1;
}

}  // namespace

TEST_CASE("ray triangle intersector agrees with plane plus barycentric reference") {
  CounterRng rng(77);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    auto pt = [&](int k) {
      return Eigen::Vector3d(rng.uniform(9 * i + k * 3) * 2 - 1, rng.uniform(9 * i + k * 3 + 1) * 2 - 1,
                             rng.uniform(9 * i + k * 3 + 2) * 2 - 1);
    };
    Eigen::Vector3d a = pt(0), b = pt(1), c = pt(2);
    CounterRng rng2(i + 1000);
    Eigen::Vector3d o(rng2.uniform(0) * 4 - 2, rng2.uniform(1) * 4 - 2, rng2.uniform(2) * 4 - 2);
    // Aim through a random interior point so hits dominate the sample.
    double bu = rng2.uniform(3), bv = rng2.uniform(4) * (1 - bu);
    Eigen::Vector3d inner = (1 - bu - bv) * a + bu * b + bv * c;
    Eigen::Vector3d d = inner - o;
    if (d.norm() < 1e-3) continue;
    d.normalize();

    double t1, u1, v1, t2, u2, v2;
    bool hit1 = rayTriangle<double>(o, d, a, b, c, t1, u1, v1);
    bool hit2 = rayTrianglePlaneBary(o, d, a, b, c, t2, u2, v2);
    if (!hit2) continue;
    // Skip cases within a whisker of an edge or of parallel incidence, where
    // the two formulations may legitimately disagree.
    double margin = std::min({u2, v2, 1 - u2 - v2});
    Eigen::Vector3d n = (b - a).cross(c - a);
    if (margin < 1e-6 || std::abs(n.normalized().dot(d)) < 1e-3) continue;
    ++checked;
    REQUIRE(hit1);
    CHECK(t1 == doctest::Approx(t2).epsilon(1e-9));
    CHECK(u1 == doctest::Approx(u2).epsilon(1e-7));
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-7));
  }
  CHECK(checked > 300);
}

TEST_CASE("single triangle bvh hits through the centroid") {
  TriangleMesh m;
  m.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}};
  Bvh bvh(m);
  Eigen::Vector3d centroid(1.0 / 3, 1.0 / 3, 0);
  RayHit hit = bvh.raycastFirst(centroid + Eigen::Vector3d(0, 0, 2), {0, 0, -1});
  REQUIRE(hit.valid());
  CHECK(hit.face == 0);
  CHECK(hit.t == doctest::Approx(2.0));
}

TEST_CASE("unit cube ray hits the +x side at t = 1.5") {
  TriangleMesh cube = fixtures::box({0.5, 0.5, 0.5});
  REQUIRE(cube.faceCount() == 12);
  Bvh bvh(cube);
  Eigen::Vector3d origin(2, 0.1, 0.1);
  Eigen::Vector3d dir(-1, 0, 0);
  RayHit hit = bvh.raycastFirst(origin, dir);
  REQUIRE(hit.valid());
  CHECK(hit.t == doctest::Approx(1.5));
  // The struck face lies in the x = +0.5 plane.
  for (int k = 0; k < 3; ++k)
    CHECK(cube.positions[cube.faces[hit.face][k]].x() == doctest::Approx(0.5));
  RayHit brute = raycastFirstBrute(cube, origin, dir);
  CHECK(hit.face == brute.face);
  CHECK(hit.t == brute.t);
}

TEST_CASE("ray parallel to and outside a plane misses") {
  TriangleMesh plane = fixtures::planeGrid(2, 2);
  Bvh bvh(plane);
  RayHit hit = bvh.raycastFirst({-1, -1, 0.5}, {1, 0, 0});
  CHECK(!hit.valid());
}

TEST_CASE("ray from inside a closed cube hits a backface in any direction") {
  TriangleMesh cube = fixtures::box({0.5, 0.5, 0.5});
  Bvh bvh(cube);
  for (const auto& dir : fixtures::randomUnitVectors(64, 3)) {
    RayHit hit = bvh.raycastFirst(Eigen::Vector3d(0.01, -0.02, 0.03), dir);
    RayHit brute = raycastFirstBrute(cube, Eigen::Vector3d(0.01, -0.02, 0.03), dir);
    REQUIRE(hit.valid());
    CHECK(hit.face == brute.face);
    CHECK(hit.t == brute.t);
    // Backface: the face normal points along the ray, away from the origin.
    CHECK(faceNormal(cube, hit.face).dot(dir) > 0);
  }
}

TEST_CASE("grazing ray at a shared edge reports the lower face index") {
  // Two triangles sharing the diagonal (0,0)-(1,1) of a unit quad in z = 0.
  TriangleMesh m;
  m.positions = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  Bvh bvh(m);
  // Ray straight down through a point on the shared diagonal.
  RayHit hit = bvh.raycastFirst({0.25, 0.25, 1.0}, {0, 0, -1});
  REQUIRE(hit.valid());
  CHECK(hit.face == 0);
  RayHit brute = raycastFirstBrute(m, {0.25, 0.25, 1.0}, {0, 0, -1});
  CHECK(brute.face == 0);
  CHECK(hit.t == brute.t);
}

TEST_CASE("bvh equals brute force on 10k-face sphere for 1000 random rays") {
  TriangleMesh sphere = fixtures::uvSphere(72, 72, 0.5);
  REQUIRE(sphere.faceCount() > 10000);
  Bvh bvh(sphere);
  auto origins = fixtures::randomPointsInBox(1000, {{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}}, 21);
  auto dirs = fixtures::randomUnitVectors(1000, 22);
  auto targets = fixtures::randomPointsInBox(1000, {{-0.4, -0.4, -0.4}, {0.4, 0.4, 0.4}}, 23);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    // Half the rays are aimed near the sphere so hits are well represented.
    Eigen::Vector3d dir = i % 2 ? dirs[i] : (targets[i] - origins[i]).normalized();
    RayHit a = bvh.raycastFirst(origins[i], dir);
    RayHit b = raycastFirstBrute(sphere, origins[i], dir);
    REQUIRE(a.face == b.face);
    if (a.valid()) {
      CHECK(a.t == b.t);
      CHECK(a.u == b.u);
      CHECK(a.v == b.v);
      ++hits;
    }
  }
  CHECK(hits > 100);
}

TEST_CASE("closest point on a vertex gives distance 0 and a corner barycentric") {
  TriangleMesh m = fixtures::icosphere(1, 0.5);
  Bvh bvh(m);
  Eigen::Vector3d q = m.positions[7];
  SurfacePoint sp = bvh.closestPoint(q);
  REQUIRE(sp.valid());
  CHECK(sp.distance() == doctest::Approx(0.0).epsilon(1e-12));
  // Barycentric is a permutation of (1, 0, 0).
  double maxW = sp.barycentric.maxCoeff();
  CHECK(maxW == doctest::Approx(1.0));
  CHECK(sp.barycentric.sum() == doctest::Approx(1.0));
  CHECK((sp.point - q).norm() < 1e-12);
}

TEST_CASE("closest point from the cube center has distance 0.5") {
  TriangleMesh cube = fixtures::box({0.5, 0.5, 0.5}, 2);
  Bvh bvh(cube);
  SurfacePoint sp = bvh.closestPoint(Eigen::Vector3d::Zero());
  CHECK(sp.distance() == doctest::Approx(0.5));
}

TEST_CASE("closest point equals brute force on 1000 random queries") {
  TriangleMesh sphere = fixtures::starBlob(4, 48, 48);
  Bvh bvh(sphere);
  auto queries = fixtures::randomPointsInBox(1000, {{-1, -1, -1}, {1, 1, 1}}, 31);
  for (const auto& q : queries) {
    SurfacePoint a = bvh.closestPoint(q);
    SurfacePoint b = closestPointBrute(sphere, q);
    REQUIRE(a.face == b.face);
    CHECK(a.distanceSquared == b.distanceSquared);
    CHECK(a.point == b.point);
  }
}

TEST_CASE("bounded closest point matches the global result inside its radius") {
  TriangleMesh sphere = fixtures::icosphere(3, 0.5);
  Bvh bvh(sphere);
  auto queries = fixtures::randomPointsInBox(200, {{-1, -1, -1}, {1, 1, 1}}, 41);
  for (const auto& q : queries) {
    SurfacePoint full = bvh.closestPoint(q);
    SurfacePoint bounded = bvh.closestPointWithin(q, 0.2);
    if (full.distance() < 0.2) {
      REQUIRE(bounded.valid());
      CHECK(bounded.face == full.face);
      CHECK(bounded.distanceSquared == full.distanceSquared);
    } else if (full.distance() > 0.2) {
      CHECK(!bounded.valid());
    }
  }
}

TEST_CASE("closest point distance is zero exactly on the surface") {
  TriangleMesh m = fixtures::icosphere(2, 0.5);
  Bvh bvh(m);
  CounterRng rng(6);
  for (int i = 0; i < 100; ++i) {
    int f = static_cast<int>(rng.below(3 * i, m.faceCount()));
    double u = rng.uniform(3 * i + 1), v = rng.uniform(3 * i + 2) * (1 - u);
    const auto& tri = m.faces[f];
    Eigen::Vector3d p = (1 - u - v) * m.positions[tri[0]] + u * m.positions[tri[1]] +
                        v * m.positions[tri[2]];
    CHECK(bvh.closestPoint(p).distance() < 1e-9);
  }
}

TEST_CASE("bvh build is deterministic and structurally sound") {
  TriangleMesh m = fixtures::starBlob(9, 40, 40);
  Bvh a(m);
  Bvh b(m);
  REQUIRE(a.nodes().size() == b.nodes().size());
  CHECK(a.faceOrder() == b.faceOrder());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    CHECK(a.nodes()[i].left == b.nodes()[i].left);
    CHECK(a.nodes()[i].first == b.nodes()[i].first);
    CHECK(a.nodes()[i].count == b.nodes()[i].count);
  }

  // Every face appears in exactly one leaf.
  std::set<int> seen;
  for (const auto& node : a.nodes()) {
    if (!node.leaf()) continue;
    for (int i = 0; i < node.count; ++i) {
      bool inserted = seen.insert(a.faceOrder()[node.first + i]).second;
      CHECK(inserted);
    }
  }
  CHECK(static_cast<int>(seen.size()) == m.faceCount());

  // Each leaf box contains its triangles.
  for (const auto& node : a.nodes()) {
    if (!node.leaf()) continue;
    for (int i = 0; i < node.count; ++i) {
      const auto& tri = m.faces[a.faceOrder()[node.first + i]];
      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d& p = m.positions[tri[k]];
        CHECK((p.array() >= node.box.min.array() - 1e-12).all());
        CHECK((p.array() <= node.box.max.array() + 1e-12).all());
      }
    }
  }
}

TEST_CASE("bvh build rejects bad input") {
  TriangleMesh empty;
  empty.positions = {{0, 0, 0}};
  CHECK_THROWS_AS(Bvh bvh(empty), Error);

  TriangleMesh nan;
  nan.positions = {{0, 0, 0}, {1, 0, 0}, {0, std::nan(""), 0}};
  nan.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(Bvh bvh2(nan), Error);
}
