#include "meshforge/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meshforge/bake/tangent.h"
#include "meshforge/core/error.h"
#include "meshforge/core/parallel.h"
#include "meshforge/render/camera.h"
#include "meshforge/render/raster.h"
#include "meshforge/spatial/bvh.h"

namespace meshforge {

std::vector<SurfaceSample> surfaceSampleSet(const TriangleMesh& mesh, int count,
                                            const CounterRng& rng, std::uint64_t offset) {
  const int nf = static_cast<int>(mesh.faces.size());
  if (nf == 0 || count <= 0) return {};

  std::vector<double> cumulative(nf);
  double total = 0.0;
  for (int f = 0; f < nf; ++f) {
    total += faceArea(mesh, f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidGeometry, "mesh has zero surface area");

  std::vector<SurfaceSample> samples(count);
  parallelFor(0, count, [&](std::int64_t i) {
    const std::uint64_t base = offset + 3ull * static_cast<std::uint64_t>(i);
    const double r = rng.uniform(base) * total;
    const int face = static_cast<int>(
        std::lower_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
    const int f = std::min(face, nf - 1);

    const double su = std::sqrt(rng.uniform(base + 1));
    const double v = rng.uniform(base + 2);
    const Eigen::Vector3d bary(1.0 - su, su * (1.0 - v), su * v);

    const auto& fc = mesh.faces[f];
    SurfaceSample s;
    s.face = f;
    s.barycentric = bary;
    s.point = bary.x() * mesh.positions[fc[0]] + bary.y() * mesh.positions[fc[1]] +
              bary.z() * mesh.positions[fc[2]];
    samples[i] = s;
  });
  return samples;
}

namespace {

struct DistanceStats {
  double sum = 0.0;
  double maxVal = 0.0;
};

// One direction of the symmetric distance: samples on `from`, closest point
// queries against `to`. Chunked so the sum order is fixed regardless of
// thread count.
DistanceStats directedStats(const TriangleMesh& from, const Bvh& toBvh, int samples,
                            const CounterRng& rng, std::uint64_t offset) {
  const auto pts = surfaceSampleSet(from, samples, rng, offset);
  auto partials = parallelChunks<DistanceStats>(
      static_cast<std::int64_t>(pts.size()), 4096,
      [&](DistanceStats& st, std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
          const auto hit = toBvh.closestPoint(pts[i].point);
          const double d = std::sqrt(hit.distanceSquared);
          st.sum += d;
          st.maxVal = std::max(st.maxVal, d);
        }
      });
  DistanceStats out;
  for (const auto& p : partials) {
    out.sum += p.sum;
    out.maxVal = std::max(out.maxVal, p.maxVal);
  }
  return out;
}

struct PairStats {
  DistanceStats ab;
  DistanceStats ba;
  int samples = 0;
};

PairStats symmetricStats(const TriangleMesh& a, const TriangleMesh& b, int samples,
                         std::uint64_t seed) {
  if (samples <= 0) throw Error(ErrorCode::InvalidConfig, "samples must be positive");
  TriangleMesh na = a;
  TriangleMesh nb = b;
  normalizePairToUnitCube(na, nb);

  const Bvh bvhA(na);
  const Bvh bvhB(nb);
  const CounterRng rng{seed};

  PairStats st;
  st.samples = samples;
  st.ab = directedStats(na, bvhB, samples, rng, 0);
  st.ba = directedStats(nb, bvhA, samples, rng, 3ull * static_cast<std::uint64_t>(samples));
  return st;
}

}  // namespace

double chamferDistance(const TriangleMesh& a, const TriangleMesh& b, int samples,
                       std::uint64_t seed) {
  const PairStats st = symmetricStats(a, b, samples, seed);
  const double n = static_cast<double>(st.samples);
  return 0.5 * (st.ab.sum / n + st.ba.sum / n);
}

double hausdorffDistance(const TriangleMesh& a, const TriangleMesh& b, int samples,
                         std::uint64_t seed) {
  const PairStats st = symmetricStats(a, b, samples, seed);
  return std::max(st.ab.maxVal, st.ba.maxVal);
}

std::int64_t flippedNormalsPixels(const TriangleMesh& mesh, int views, int resolution) {
  TriangleMesh normalized = mesh;
  normalizeToSphere(normalized, 0.5);

  const auto cameras = fibonacciCameras(views, resolution);
  RasterOptions plain;
  RasterOptions culled;
  culled.backfaceCull = true;

  const ViewSet full = renderGeometry(normalized, cameras, plain);
  const ViewSet front = renderGeometry(normalized, cameras, culled);

  std::int64_t disagree = 0;
  for (int k = 0; k < views; ++k) {
    const auto& va = full.views[k];
    const auto& vb = front.views[k];
    for (int y = 0; y < resolution; ++y) {
      for (int x = 0; x < resolution; ++x) {
        const bool fa = va.foreground(x, y);
        const bool fb = vb.foreground(x, y);
        if (fa != fb) {
          ++disagree;
        } else if (fa && va.depth.at(x, y) != vb.depth.at(x, y)) {
          // Both covered but by different surfaces: a backfacing front
          // face was culled and something behind it won instead.
          ++disagree;
        }
      }
    }
  }
  return disagree;
}

namespace {

Eigen::Vector3d interpolatedNormal(const TriangleMesh& mesh,
                                   const std::vector<Eigen::Vector3d>& vertexNormals, int face,
                                   const Eigen::Vector3d& bary) {
  const auto& fc = mesh.faces[face];
  Eigen::Vector3d n = bary.x() * vertexNormals[fc[0]] + bary.y() * vertexNormals[fc[1]] +
                      bary.z() * vertexNormals[fc[2]];
  const double len = n.norm();
  if (len > 1e-12) return n / len;
  return faceNormal(mesh, face);
}

double angleDeg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double d = std::clamp(a.dot(b), -1.0, 1.0);
  return std::acos(d) * 180.0 / M_PI;
}

struct HighpolyProbe {
  const TriangleMesh& mesh;
  std::vector<Eigen::Vector3d> normals;
  Bvh bvh;

  explicit HighpolyProbe(const TriangleMesh& m)
      : mesh(m), normals(computeVertexNormals(m)), bvh(m) {}

  Eigen::Vector3d normalNear(const Eigen::Vector3d& p) const {
    const auto hit = bvh.closestPoint(p);
    return interpolatedNormal(mesh, normals, hit.face, hit.barycentric);
  }
};

}  // namespace

double geoMeanErrorDeg(const TriangleMesh& lowpoly, const TriangleMesh& highpoly, int samples,
                       std::uint64_t seed) {
  if (samples <= 0) throw Error(ErrorCode::InvalidConfig, "samples must be positive");
  const auto loNormals = computeVertexNormals(lowpoly);
  const HighpolyProbe hi(highpoly);

  const CounterRng rng{seed};
  const auto pts = surfaceSampleSet(lowpoly, samples, rng, 0);

  auto partials = parallelChunks<double>(
      static_cast<std::int64_t>(pts.size()), 2048,
      [&](double& sum, std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
          const Eigen::Vector3d nLo =
              interpolatedNormal(lowpoly, loNormals, pts[i].face, pts[i].barycentric);
          const Eigen::Vector3d nHi = hi.normalNear(pts[i].point);
          sum += angleDeg(nLo, nHi);
        }
      });
  double total = 0.0;
  for (double p : partials) total += p;
  return total / static_cast<double>(samples);
}

BakedError bakedMeanErrorDeg(const TriangleMesh& lowpoly, const ImageU8& normalMap,
                             const TriangleMesh& highpoly, int samples, std::uint64_t seed) {
  if (samples <= 0) throw Error(ErrorCode::InvalidConfig, "samples must be positive");
  if (!lowpoly.hasUvs()) {
    throw Error(ErrorCode::InvalidGeometry, "baked error needs a UV-mapped lowpoly mesh");
  }
  if (normalMap.channels < 3) {
    throw Error(ErrorCode::InvalidConfig, "normal map must have at least 3 channels");
  }

  const auto frames = computeWedgeTangents(lowpoly);
  const HighpolyProbe hi(highpoly);

  const CounterRng rng{seed};
  const auto pts = surfaceSampleSet(lowpoly, samples, rng, 0);

  struct Partial {
    double sum = 0.0;
    int used = 0;
    int excluded = 0;
  };
  auto partials = parallelChunks<Partial>(
      static_cast<std::int64_t>(pts.size()), 2048,
      [&](Partial& acc, std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
          const int f = pts[i].face;
          const Eigen::Vector3d& bary = pts[i].barycentric;
          const auto& uvIdx = lowpoly.faceUvs[f];
          const Eigen::Vector2d uv = bary.x() * lowpoly.uvs[uvIdx[0]] +
                                     bary.y() * lowpoly.uvs[uvIdx[1]] +
                                     bary.z() * lowpoly.uvs[uvIdx[2]];

          // v runs downward: uv (0,0) is the top-left corner of the atlas,
          // texel centers sit at (i + 0.5) / size.
          const double px = uv.x() * normalMap.width - 0.5;
          const double py = uv.y() * normalMap.height - 0.5;
          Eigen::Vector3d decoded;
          for (int c = 0; c < 3; ++c) {
            decoded[c] = normalMap.bilinear(px, py, c) / 255.0 * 2.0 - 1.0;
          }
          const double len = decoded.norm();
          if (len < 0.5) {
            ++acc.excluded;
            continue;
          }
          decoded /= len;

          const auto& fr = frames[f];
          Eigen::Vector3d t = bary.x() * fr[0].tangent + bary.y() * fr[1].tangent +
                              bary.z() * fr[2].tangent;
          Eigen::Vector3d b = bary.x() * fr[0].bitangent + bary.y() * fr[1].bitangent +
                              bary.z() * fr[2].bitangent;
          Eigen::Vector3d n = bary.x() * fr[0].normal + bary.y() * fr[1].normal +
                              bary.z() * fr[2].normal;

          Eigen::Vector3d world = decoded.x() * t + decoded.y() * b + decoded.z() * n;
          const double wlen = world.norm();
          if (wlen < 1e-12) {
            ++acc.excluded;
            continue;
          }
          world /= wlen;

          acc.sum += angleDeg(world, hi.normalNear(pts[i].point));
          ++acc.used;
        }
      });

  BakedError out;
  double sum = 0.0;
  for (const auto& p : partials) {
    sum += p.sum;
    out.used += p.used;
    out.excluded += p.excluded;
  }
  out.meanDeg = out.used > 0 ? sum / out.used : 0.0;
  return out;
}

}  // namespace meshforge
