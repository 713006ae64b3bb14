#include "meshforge/render/raster.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshforge/core/parallel.h"
#include "meshforge/spatial/tri_geom.h"

namespace meshforge {

RenderedView renderView(const TriangleMesh& mesh,
                        const std::vector<Eigen::Vector3d>& vertexNormals,
                        const OrthoCamera& camera, const RasterOptions& options) {
  const int res = camera.resolution;
  RenderedView view;
  view.position = ImageF(res, res, 3, 0.0f);
  view.normal = ImageF(res, res, 3, 0.0f);
  view.depth = ImageF(res, res, 1, std::numeric_limits<float>::infinity());
  view.face = Image<std::int32_t>(res, res, 1, -1);

  const Eigen::Vector3d dir = camera.direction;
  const Eigen::Vector3d up = camera.up;
  const Eigen::Vector3d right = camera.right();
  const double he = camera.halfExtent;
  const double step = 2.0 * he / res;

  // Ray origins decompose into column and row parts; cache both so the inner
  // loop adds two vectors instead of scaling four. The sums reproduce
  // camera.rayOrigin(px, py) bit for bit.
  std::vector<Eigen::Vector3d> colU(res), rowV(res);
  for (int p = 0; p < res; ++p) {
    colU[p] = camera.pixelU(p) * right;
    rowV[p] = camera.pixelV(p) * up;
  }

  float* depthData = view.depth.data.data();
  std::int32_t* faceData = view.face.data.data();

  for (int f = 0; f < mesh.faceCount(); ++f) {
    const auto& tri = mesh.faces[f];
    const Eigen::Vector3d& a = mesh.positions[tri[0]];
    const Eigen::Vector3d& b = mesh.positions[tri[1]];
    const Eigen::Vector3d& c = mesh.positions[tri[2]];
    if (options.backfaceCull && (b - a).cross(c - a).dot(dir) > 0.0) continue;

    double u0 = a.dot(right), u1 = b.dot(right), u2 = c.dot(right);
    double v0 = a.dot(up), v1 = b.dot(up), v2 = c.dot(up);
    double umin = std::min({u0, u1, u2}), umax = std::max({u0, u1, u2});
    double vmin = std::min({v0, v1, v2}), vmax = std::max({v0, v1, v2});

    // Candidate pixels: the projected bounding box padded by one pixel; the
    // exact ray test decides coverage.
    int pxLo = std::max(0, static_cast<int>(std::floor((umin + he) / step - 0.5)) - 1);
    int pxHi = std::min(res - 1, static_cast<int>(std::ceil((umax + he) / step - 0.5)) + 1);
    int pyLo = std::max(0, static_cast<int>(std::floor((he - vmax) / step - 0.5)) - 1);
    int pyHi = std::min(res - 1, static_cast<int>(std::ceil((he - vmin) / step - 0.5)) + 1);
    if (pxLo > pxHi || pyLo > pyHi) continue;

    // Moller-Trumbore with the per-face factors hoisted out of the pixel
    // loop. Expressions and evaluation order mirror rayTriangle() exactly so
    // u, v and t stay bit-identical to a per-pixel call; the brute-force
    // oracles in the tests rely on that equality.
    const Eigen::Vector3d e1 = b - a;
    const Eigen::Vector3d e2 = c - a;
    const Eigen::Vector3d pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < 1e-9) continue;
    const double invDet = 1.0 / det;

    for (int py = pyLo; py <= pyHi; ++py) {
      const Eigen::Vector3d rowOrigin = rowV[py];
      for (int px = pxLo; px <= pxHi; ++px) {
        const Eigen::Vector3d origin = colU[px] + rowOrigin;
        const Eigen::Vector3d svec = origin - a;
        const double bu = svec.dot(pvec) * invDet;
        if (bu < 0.0 || bu > 1.0) continue;
        const Eigen::Vector3d qvec = svec.cross(e1);
        const double bv = dir.dot(qvec) * invDet;
        if (bv < 0.0 || bu + bv > 1.0) continue;
        const double t = e2.dot(qvec) * invDet;

        const float depth = static_cast<float>(-t);
        const std::size_t idx = static_cast<std::size_t>(py) * res + px;
        if (faceData[idx] >= 0 && !(depth > depthData[idx])) continue;

        faceData[idx] = f;
        depthData[idx] = depth;
        Eigen::Vector3d hit = origin + t * dir;
        Eigen::Vector3d n = (1.0 - bu - bv) * vertexNormals[tri[0]] +
                            bu * vertexNormals[tri[1]] + bv * vertexNormals[tri[2]];
        double len = n.norm();
        if (len > 0) n /= len;
        for (int k = 0; k < 3; ++k) {
          view.position.at(px, py, k) = static_cast<float>(hit[k]);
          view.normal.at(px, py, k) = static_cast<float>(n[k]);
        }
      }
    }
  }
  return view;
}

ViewSet renderGeometry(const TriangleMesh& mesh, const std::vector<OrthoCamera>& cameras,
                       const RasterOptions& options) {
  ViewSet set;
  set.cameras = cameras;
  set.views.resize(cameras.size());
  std::vector<Eigen::Vector3d> normals =
      mesh.hasNormals() ? mesh.normals : computeVertexNormals(mesh);
  parallelFor(
      0, static_cast<std::int64_t>(cameras.size()),
      [&](std::int64_t i) { set.views[i] = renderView(mesh, normals, cameras[i], options); }, 1);
  return set;
}

}  // namespace meshforge
