#include "meshforge/bake/gbuffer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "meshforge/bake/tangent.h"
#include "meshforge/core/error.h"
#include "meshforge/core/parallel.h"
#include "meshforge/spatial/bvh.h"

namespace meshforge {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Ownership of points exactly on an edge, equivalent to nudging the sample by
// (-eps, -eps^2): the claim then lands in exactly one of the triangles meeting
// there. d is the directed edge in pixel space.
bool ownsBoundary(const Eigen::Vector2d& d) {
  if (d.y() != 0.0) return d.y() > 0.0;
  return d.x() < 0.0;
}

// Faces whose UV mapping cannot be trusted: vanishing UV area, vanishing
// surface area, or a texel density far from what the rest of the chart uses.
std::vector<std::uint8_t> reliableFaces(const TriangleMesh& mesh) {
  const int nf = mesh.faceCount();

  // Charts are UV-connected islands: faces sharing a UV index share a chart.
  std::vector<int> parent(mesh.uvs.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (int f = 0; f < nf; ++f) {
    unite(mesh.faceUvs[f][0], mesh.faceUvs[f][1]);
    unite(mesh.faceUvs[f][0], mesh.faceUvs[f][2]);
  }

  std::vector<double> uvArea(nf), ratio(nf, -1.0);
  std::vector<int> island(nf);
  std::vector<std::vector<double>> samples(mesh.uvs.size());
  for (int f = 0; f < nf; ++f) {
    const auto& uvTri = mesh.faceUvs[f];
    uvArea[f] = 0.5 * std::abs(cross2(mesh.uvs[uvTri[1]] - mesh.uvs[uvTri[0]],
                                      mesh.uvs[uvTri[2]] - mesh.uvs[uvTri[0]]));
    island[f] = find(uvTri[0]);
    const double surf = faceArea(mesh, f);
    if (surf > 1e-20) {
      ratio[f] = uvArea[f] / surf;
      samples[island[f]].push_back(ratio[f]);
    }
  }

  std::vector<double> median(mesh.uvs.size(), 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].empty()) continue;
    auto mid = samples[i].begin() + samples[i].size() / 2;
    std::nth_element(samples[i].begin(), mid, samples[i].end());
    median[i] = *mid;
  }

  std::vector<std::uint8_t> reliable(nf, 0);
  for (int f = 0; f < nf; ++f) {
    if (uvArea[f] < 1e-8) continue;         // atlas UVs live in the unit square
    if (ratio[f] < 0.0) continue;           // degenerate surface triangle
    const double m = median[island[f]];
    if (ratio[f] > 100.0 * m || 100.0 * ratio[f] < m) continue;
    reliable[f] = 1;
  }
  return reliable;
}

std::uint8_t encodeChannel(double v) {
  const long q = std::lround((v + 1.0) * 0.5 * 255.0);
  return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

}  // namespace

GBuffer rasterizeGBuffer(const TriangleMesh& lowpoly, int resolution) {
  validateMesh(lowpoly);
  if (!lowpoly.hasUvs()) {
    throw Error(ErrorCode::InvalidGeometry, "atlas rasterization needs a UV-mapped mesh");
  }
  if (resolution < 1) throw Error(ErrorCode::InvalidConfig, "resolution must be >= 1");

  const auto frames = computeWedgeTangents(lowpoly);
  const auto reliable = reliableFaces(lowpoly);

  GBuffer g;
  g.resolution = resolution;
  const std::size_t texels = static_cast<std::size_t>(resolution) * resolution;
  g.position.assign(texels, Eigen::Vector3f::Zero());
  g.normal.assign(texels, Eigen::Vector3f::Zero());
  g.tangent.assign(texels, Eigen::Vector3f::Zero());
  g.bitangent.assign(texels, Eigen::Vector3f::Zero());
  g.valid.assign(texels, 0);
  g.reliable.assign(texels, 0);
  std::vector<int> owner(texels, -1);

  const double res = resolution;
  for (int f = 0; f < lowpoly.faceCount(); ++f) {
    const auto& uvTri = lowpoly.faceUvs[f];
    const Eigen::Vector2d p[3] = {lowpoly.uvs[uvTri[0]] * res, lowpoly.uvs[uvTri[1]] * res,
                                  lowpoly.uvs[uvTri[2]] * res};
    const double doubled = cross2(p[1] - p[0], p[2] - p[0]);
    if (doubled == 0.0) continue;
    const double orient = doubled > 0.0 ? 1.0 : -1.0;

    // Canonical edge functions: both triangles sharing a UV edge evaluate the
    // identical expression, so boundary ownership is exactly antisymmetric.
    Eigen::Vector2d origin[3], dir[3];
    double sign[3];
    for (int k = 0; k < 3; ++k) {
      const int i0 = uvTri[k], i1 = uvTri[(k + 1) % 3];
      const int lo = std::min(i0, i1), hi = std::max(i0, i1);
      if (lo == hi) {
        sign[k] = 0.0;  // collapsed edge: triangle has no interior anyway
        continue;
      }
      origin[k] = lowpoly.uvs[lo] * res;
      dir[k] = lowpoly.uvs[hi] * res - origin[k];
      sign[k] = (i0 == lo ? 1.0 : -1.0) * orient;
    }
    if (sign[0] == 0.0 || sign[1] == 0.0 || sign[2] == 0.0) continue;

    Eigen::Vector2d lobox = p[0].cwiseMin(p[1]).cwiseMin(p[2]);
    Eigen::Vector2d hibox = p[0].cwiseMax(p[1]).cwiseMax(p[2]);
    const int x0 = std::max(0, static_cast<int>(std::floor(lobox.x() - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(lobox.y() - 0.5)));
    const int x1 = std::min(resolution - 1, static_cast<int>(std::ceil(hibox.x() - 0.5)));
    const int y1 = std::min(resolution - 1, static_cast<int>(std::ceil(hibox.y() - 0.5)));

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Eigen::Vector2d center(x + 0.5, y + 0.5);
        bool inside = true;
        for (int k = 0; k < 3 && inside; ++k) {
          const double e = sign[k] * cross2(dir[k], center - origin[k]);
          if (e < 0.0 || (e == 0.0 && !ownsBoundary(sign[k] * dir[k]))) inside = false;
        }
        if (!inside) continue;

        const std::size_t t = g.index(x, y);
        if (owner[t] >= 0) {
          throw Error(ErrorCode::AtlasOverlap, "texel claimed by two UV triangles");
        }
        owner[t] = f;

        Eigen::Vector3d w(cross2(p[2] - p[1], center - p[1]) / doubled,
                          cross2(p[0] - p[2], center - p[2]) / doubled,
                          cross2(p[1] - p[0], center - p[0]) / doubled);

        const auto& tri = lowpoly.faces[f];
        const Eigen::Vector3d pos = w.x() * lowpoly.positions[tri[0]] +
                                    w.y() * lowpoly.positions[tri[1]] +
                                    w.z() * lowpoly.positions[tri[2]];
        const auto& fr = frames[f];
        Eigen::Vector3d n =
            w.x() * fr[0].normal + w.y() * fr[1].normal + w.z() * fr[2].normal;
        const double nLen = n.norm();
        n = nLen > 1e-12 ? Eigen::Vector3d(n / nLen) : fr[0].normal;
        Eigen::Vector3d tan =
            w.x() * fr[0].tangent + w.y() * fr[1].tangent + w.z() * fr[2].tangent;
        tan -= n * n.dot(tan);
        const double tLen = tan.norm();
        tan = tLen > 1e-12 ? Eigen::Vector3d(tan / tLen) : anyPerpendicular(n);

        g.position[t] = pos.cast<float>();
        g.normal[t] = n.cast<float>();
        g.tangent[t] = tan.cast<float>();
        g.bitangent[t] = n.cross(tan).cast<float>();
        g.valid[t] = 1;
        g.reliable[t] = reliable[f];
      }
    }
  }
  return g;
}

ImageU8 transferNormals(const GBuffer& gbuffer, const TriangleMesh& highpoly,
                        double bboxDiagonal, double maxDistanceFraction) {
  if (gbuffer.empty()) throw Error(ErrorCode::InvalidConfig, "g-buffer is empty");
  validateMesh(highpoly);
  if (!(bboxDiagonal > 0.0) || !(maxDistanceFraction > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "distance filter must be positive");
  }

  std::vector<Eigen::Vector3d> hiNormals =
      highpoly.hasNormals() ? highpoly.normals : computeVertexNormals(highpoly);
  for (auto& n : hiNormals) {
    const double len = n.norm();
    if (len > 1e-20) n /= len;
  }

  const Bvh bvh(highpoly);
  const double maxDist = maxDistanceFraction * bboxDiagonal;
  const int res = gbuffer.resolution;

  ImageU8 map(res, res, 3, 128);  // background decodes to ~zero, norm < 0.5
  const std::uint8_t neutral[3] = {128, 128, 255};  // tangent-space (0, 0, 1)

  parallelFor(
      0, static_cast<std::int64_t>(res) * res,
      [&](std::int64_t t) {
        if (!gbuffer.valid[t]) return;
        const int x = static_cast<int>(t % res);
        const int y = static_cast<int>(t / res);
        auto writeNeutral = [&] {
          for (int c = 0; c < 3; ++c) map.at(x, y, c) = neutral[c];
        };
        if (!gbuffer.reliable[t]) {
          writeNeutral();
          return;
        }
        const SurfacePoint hit =
            bvh.closestPointWithin(gbuffer.position[t].cast<double>(), maxDist);
        if (!hit.valid()) {
          writeNeutral();
          return;
        }

        const auto& tri = highpoly.faces[hit.face];
        Eigen::Vector3d n = hit.barycentric.x() * hiNormals[tri[0]] +
                            hit.barycentric.y() * hiNormals[tri[1]] +
                            hit.barycentric.z() * hiNormals[tri[2]];
        Eigen::Vector3d ts(n.dot(gbuffer.tangent[t].cast<double>()),
                           n.dot(gbuffer.bitangent[t].cast<double>()),
                           n.dot(gbuffer.normal[t].cast<double>()));
        const double len = ts.norm();
        if (len < 1e-12) {
          writeNeutral();
          return;
        }
        ts /= len;
        for (int c = 0; c < 3; ++c) map.at(x, y, c) = encodeChannel(ts[c]);
      },
      4096);
  return map;
}

ImageU8 dilateSeams(const ImageU8& map, const GBuffer& gbuffer, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidConfig, "dilation radius must be >= 0");
  if (map.width != gbuffer.resolution || map.height != gbuffer.resolution) {
    throw Error(ErrorCode::ShapeMismatch, "map and g-buffer resolutions differ");
  }
  ImageU8 out = map;
  if (radius == 0) return out;

  const int res = gbuffer.resolution;
  const std::size_t texels = static_cast<std::size_t>(res) * res;
  const std::int64_t none = std::numeric_limits<std::int64_t>::max();
  std::vector<Eigen::Vector2i> source(texels);
  std::vector<std::int64_t> dist2(texels, none);
  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      if (gbuffer.valid[gbuffer.index(x, y)]) {
        source[gbuffer.index(x, y)] = Eigen::Vector2i(x, y);
        dist2[gbuffer.index(x, y)] = 0;
      }
    }
  }

  // Chamfer propagation: each pass grows the filled region by one chebyshev
  // ring while refining toward the euclidean-nearest source. Double-buffered,
  // so the result is independent of scan order.
  std::vector<Eigen::Vector2i> nextSource = source;
  std::vector<std::int64_t> nextDist2 = dist2;
  for (int pass = 0; pass < radius; ++pass) {
    for (int y = 0; y < res; ++y) {
      for (int x = 0; x < res; ++x) {
        const std::size_t t = gbuffer.index(x, y);
        if (dist2[t] == 0) continue;
        std::int64_t best = dist2[t];
        Eigen::Vector2i bestSource = source[t];
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || nx >= res || ny < 0 || ny >= res) continue;
            const std::size_t nt = gbuffer.index(nx, ny);
            if (dist2[nt] == none) continue;
            const Eigen::Vector2i s = source[nt];
            const std::int64_t d = static_cast<std::int64_t>(x - s.x()) * (x - s.x()) +
                                   static_cast<std::int64_t>(y - s.y()) * (y - s.y());
            if (d < best) {
              best = d;
              bestSource = s;
            }
          }
        }
        nextDist2[t] = best;
        nextSource[t] = bestSource;
      }
    }
    source.swap(nextSource);
    dist2.swap(nextDist2);
  }

  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      const std::size_t t = gbuffer.index(x, y);
      if (gbuffer.valid[t] || dist2[t] == none) continue;
      for (int c = 0; c < map.channels; ++c) {
        out.at(x, y, c) = map.at(source[t].x(), source[t].y(), c);
      }
    }
  }
  return out;
}

}  // namespace meshforge
