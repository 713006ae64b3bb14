#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <vector>

#include "meshforge/core/error.h"
#include "meshforge/core/mesh.h"
#include "meshforge/render/camera.h"
#include "meshforge/render/raster.h"
#include "meshforge/spatial/tri_geom.h"
#include "meshforge/visibility/visibility.h"
#include "support/fixtures.h"

using namespace meshforge;

namespace {

// Outer sphere with a smaller sphere sealed inside; the inner faces can
// never be reached by an exterior ray.
TriangleMesh nestedSpheres() {
  return fixtures::concatMeshes(fixtures::icosphere(3, 0.5), fixtures::icosphere(2, 0.2));
}

// Cube walls open at the top, a shelf sealing the interior at z = 0, and a
// small closed cube locked inside the sealed lower chamber.
TriangleMesh openBoxWithSealedCube() {
  TriangleMesh walls = fixtures::box({0.4, 0.4, 0.4}, 4);
  std::vector<int> top;
  for (int f = 0; f < walls.faceCount(); ++f) {
    if (faceNormal(walls, f).z() > 0.9) top.push_back(f);
  }
  fixtures::removeFaces(walls, top);

  const TriangleMesh shelf = fixtures::planeGrid(5, 5, 0.8, 0.8);

  TriangleMesh cube = fixtures::box({0.1, 0.1, 0.1}, 1);
  fixtures::transformMesh(cube, 1.0, {0, 0, -0.2});

  return fixtures::concatMeshes(fixtures::concatMeshes(walls, shelf), cube);
}

// Reference hit histogram: for every pixel of every view, test the ray
// against every face and keep the front-most (ties to the lower index),
// mirroring the rasterizer's contract without its bounding-box scan.
std::vector<std::int64_t> bruteHits(const TriangleMesh& mesh, int viewpoints, int resolution) {
  TriangleMesh centered = mesh;
  const Eigen::Vector3d center = bounds(centered).center();
  double radius = 0.0;
  for (auto& p : centered.positions) {
    p -= center;
    radius = std::max(radius, p.norm());
  }
  if (radius <= 0.0) radius = 1.0;
  const auto cameras = fibonacciCameras(viewpoints, resolution, radius * 1.04);

  std::vector<std::int64_t> hits(mesh.faceCount(), 0);
  for (const auto& cam : cameras) {
    for (int py = 0; py < resolution; ++py) {
      for (int px = 0; px < resolution; ++px) {
        const Eigen::Vector3d origin = cam.rayOrigin(px, py);
        int bestFace = -1;
        float bestDepth = -std::numeric_limits<float>::infinity();
        for (int f = 0; f < mesh.faceCount(); ++f) {
          const auto& tri = centered.faces[f];
          double t, u, v;
          if (!rayTriangle(origin, cam.direction, centered.positions[tri[0]],
                           centered.positions[tri[1]], centered.positions[tri[2]], t, u, v))
            continue;
          const float depth = static_cast<float>(-t);
          if (depth > bestDepth) {
            bestDepth = depth;
            bestFace = f;
          }
        }
        if (bestFace >= 0) ++hits[bestFace];
      }
    }
  }
  return hits;
}

std::set<int> promotedSet(const VisibilityMask& mask) {
  std::set<int> out;
  for (int f = 0; f < static_cast<int>(mask.state.size()); ++f) {
    if (mask.state[f] == FaceVisibility::PromotedExterior) out.insert(f);
  }
  return out;
}

VisibilityMask syntheticSeeds(int faceCount, const std::vector<int>& visibleFaces) {
  VisibilityMask mask;
  mask.state.assign(faceCount, FaceVisibility::Hidden);
  mask.hits.assign(faceCount, 0);
  for (int f : visibleFaces) {
    mask.state[f] = FaceVisibility::Visible;
    mask.hits[f] = 1;
  }
  return mask;
}

}  // namespace

TEST_CASE("a lone triangle is visible") {
  TriangleMesh tri;
  tri.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.faces = {{0, 1, 2}};
  const VisibilityMask mask = castVisibility(tri, 16, 64);
  CHECK(mask.state[0] == FaceVisibility::Visible);
  CHECK(mask.hits[0] >= 1);
}

TEST_CASE("rasterized hit counts match the brute-force ray caster") {
  const TriangleMesh scene = openBoxWithSealedCube();
  const VisibilityMask mask = castVisibility(scene, 16, 96);
  const auto reference = bruteHits(scene, 16, 96);

  REQUIRE(static_cast<int>(reference.size()) == scene.faceCount());
  for (int f = 0; f < scene.faceCount(); ++f) {
    CHECK(mask.hits[f] == reference[f]);
    CHECK((mask.state[f] == FaceVisibility::Visible) == (reference[f] > 0));
  }
}

TEST_CASE("every visible face has a hit and hidden faces have none") {
  const TriangleMesh scene = openBoxWithSealedCube();
  VisibilityMask mask = castVisibility(scene, 32, 128);
  mask = promoteExterior(scene, mask, 0.5);
  for (int f = 0; f < scene.faceCount(); ++f) {
    if (mask.state[f] == FaceVisibility::Visible) CHECK(mask.hits[f] >= 1);
    if (mask.state[f] == FaceVisibility::PromotedExterior) CHECK(mask.hits[f] == 0);
  }
}

TEST_CASE("a sealed inner sphere collects zero hits and is removed whole") {
  const TriangleMesh scene = nestedSpheres();
  const TriangleMesh outer = fixtures::icosphere(3, 0.5);
  const int outerFaces = outer.faceCount();

  VisibilityMask mask = castVisibility(scene, 64, 256);
  for (int f = outerFaces; f < scene.faceCount(); ++f) {
    CHECK(mask.hits[f] == 0);
    CHECK(mask.state[f] == FaceVisibility::Hidden);
  }

  // No edge joins the shells, so promotion cannot reach the inner sphere.
  const VisibilityMask promoted = promoteExterior(scene, mask, 0.5);
  for (int f = outerFaces; f < scene.faceCount(); ++f) {
    CHECK(promoted.state[f] == FaceVisibility::Hidden);
  }

  const TriangleMesh culled = removeHidden(scene, promoted);
  REQUIRE(culled.faceCount() == outerFaces);
  REQUIRE(culled.positions.size() == outer.positions.size());
  // Vertices are renumbered in face-traversal order, so compare the corner
  // geometry face by face instead of the index labels.
  for (int f = 0; f < outerFaces; ++f) {
    for (int k = 0; k < 3; ++k) {
      CHECK(culled.positions[culled.faces[f][k]] == outer.positions[outer.faces[f][k]]);
    }
  }
}

TEST_CASE("a fully visible mesh passes through unchanged") {
  const TriangleMesh sphere = fixtures::icosphere(3);
  VisibilityMask mask = castVisibility(sphere, 64, 256);
  for (int f = 0; f < sphere.faceCount(); ++f) {
    CHECK(mask.state[f] == FaceVisibility::Visible);
  }

  const VisibilityMask promoted = promoteExterior(sphere, mask, 0.5);
  CHECK(promotedSet(promoted).empty());

  const TriangleMesh out = removeHidden(sphere, promoted);
  REQUIRE(out.faceCount() == sphere.faceCount());
  REQUIRE(out.positions.size() == sphere.positions.size());
  for (int f = 0; f < out.faceCount(); ++f) CHECK(out.faces[f] == sphere.faces[f]);
  for (std::size_t v = 0; v < out.positions.size(); ++v) {
    CHECK(out.positions[v] == sphere.positions[v]);
  }
}

TEST_CASE("promotion follows the local frontier normal around smooth curvature") {
  const TriangleMesh sphere = fixtures::icosphere(3);
  const VisibilityMask seeds = syntheticSeeds(sphere.faceCount(), {0});

  // Neighbor normals on this sphere differ by a few degrees, far inside the
  // 60-degree gate, so the flood wraps all the way around. Comparing against
  // the original seed instead would strand the far hemisphere.
  const VisibilityMask flooded = promoteExterior(sphere, seeds, 0.5);
  CHECK(static_cast<int>(promotedSet(flooded).size()) == sphere.faceCount() - 1);

  // A near-exact agreement gate stops the flood at the first step.
  const VisibilityMask frozen = promoteExterior(sphere, seeds, 0.9999);
  CHECK(promotedSet(frozen).empty());
}

TEST_CASE("promotion never crosses to an opposite-winding neighbor") {
  TriangleMesh pair;
  pair.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  pair.faces = {{0, 1, 2}, {1, 3, 2}};  // consistent winding, both +z

  const VisibilityMask seeds = syntheticSeeds(2, {0});
  CHECK(promotedSet(promoteExterior(pair, seeds, 0.5)).count(1) == 1);

  TriangleMesh flipped = pair;
  fixtures::flipFaces(flipped, {1});
  CHECK(promotedSet(promoteExterior(flipped, seeds, 0.5)).empty());
}

TEST_CASE("lowering the agreement threshold never shrinks the promoted set") {
  const TriangleMesh blob = fixtures::starBlob(13, 20, 20);
  const VisibilityMask seeds = syntheticSeeds(blob.faceCount(), {0, 1, 2, 3, 4});

  const double thresholds[] = {0.966, 0.866, 0.5, 0.0, -1.0};
  std::set<int> previous;
  for (double t : thresholds) {
    const std::set<int> current = promotedSet(promoteExterior(blob, seeds, t));
    CHECK(std::includes(current.begin(), current.end(), previous.begin(), previous.end()));
    previous = current;
  }
  // At cos >= -1 every edge accepts, so everything connected is promoted.
  CHECK(static_cast<int>(previous.size()) == blob.faceCount() - 5);
}

TEST_CASE("culling hidden faces changes no rendered depth buffer") {
  for (const TriangleMesh& scene : {nestedSpheres(), openBoxWithSealedCube()}) {
    const TriangleMesh culled = cullHiddenFaces(scene, 64, 256);
    REQUIRE(culled.faceCount() < scene.faceCount());

    const auto cameras = fibonacciCameras(24, 256, 1.0);
    const ViewSet before = renderGeometry(scene, cameras, {});
    const ViewSet after = renderGeometry(culled, cameras, {});

    std::int64_t mismatched = 0;
    for (int k = 0; k < 24; ++k) {
      const auto& da = before.views[k].depth.data;
      const auto& db = after.views[k].depth.data;
      for (std::size_t i = 0; i < da.size(); ++i) {
        if (da[i] != db[i]) ++mismatched;
      }
    }
    CHECK(mismatched == 0);
  }
}

TEST_CASE("running the stage twice changes nothing more") {
  for (const TriangleMesh& scene : {nestedSpheres(), openBoxWithSealedCube()}) {
    const TriangleMesh once = cullHiddenFaces(scene, 64, 128);
    const TriangleMesh twice = cullHiddenFaces(once, 64, 128);
    REQUIRE(twice.faceCount() == once.faceCount());
    REQUIRE(twice.positions.size() == once.positions.size());
    for (int f = 0; f < once.faceCount(); ++f) CHECK(twice.faces[f] == once.faces[f]);
    for (std::size_t v = 0; v < once.positions.size(); ++v) {
      CHECK(twice.positions[v] == once.positions[v]);
    }
  }
}

TEST_CASE("cast results are reproducible bit for bit") {
  const TriangleMesh scene = openBoxWithSealedCube();
  const VisibilityMask a = castVisibility(scene, 24, 128);
  const VisibilityMask b = castVisibility(scene, 24, 128);
  CHECK(a.hits == b.hits);
  CHECK(a.state == b.state);
}

TEST_CASE("an all-hidden mask is rejected") {
  const TriangleMesh sphere = fixtures::icosphere(1);
  VisibilityMask mask;
  mask.state.assign(sphere.faceCount(), FaceVisibility::Hidden);
  mask.hits.assign(sphere.faceCount(), 0);

  try {
    (void)removeHidden(sphere, mask);
    FAIL("expected AllHidden");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllHidden);
    CHECK(!e.isValidation());
  }
}

TEST_CASE("mismatched masks and bad arguments are rejected") {
  const TriangleMesh sphere = fixtures::icosphere(1);
  VisibilityMask tiny;
  tiny.state.assign(3, FaceVisibility::Visible);
  tiny.hits.assign(3, 1);
  CHECK_THROWS_AS((void)promoteExterior(sphere, tiny, 0.5), Error);
  CHECK_THROWS_AS((void)removeHidden(sphere, tiny), Error);
  CHECK_THROWS_AS((void)castVisibility(sphere, 0, 128), Error);
  CHECK_THROWS_AS((void)castVisibility(sphere, 16, 0), Error);
}

TEST_CASE("generated-scale mesh culls within the time budget") {
  const TriangleMesh blob = fixtures::starBlob(5, 109, 109);
  REQUIRE(blob.faceCount() > 22000);

  const auto start = std::chrono::steady_clock::now();
  const TriangleMesh culled = cullHiddenFaces(blob, 64, 512);
  const double seconds = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - start).count();

  CHECK(culled.faceCount() > 0);
  CHECK(culled.faceCount() <= blob.faceCount());
  CHECK(seconds < 2.0);
}
