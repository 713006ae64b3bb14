#include "meshforge/visibility/visibility.h"

#include <deque>
#include <utility>

#include "meshforge/core/error.h"
#include "meshforge/core/parallel.h"
#include "meshforge/render/camera.h"
#include "meshforge/render/raster.h"

namespace meshforge {

VisibilityMask castVisibility(const TriangleMesh& mesh, int viewpoints, int resolution) {
  validateMesh(mesh);
  if (viewpoints <= 0 || resolution <= 0) {
    throw Error(ErrorCode::InvalidConfig, "viewpoints and resolution must be positive");
  }
  const int nf = mesh.faceCount();

  // Cameras are anchored at the world origin, so cast against a centered
  // copy. Face indices are untouched.
  TriangleMesh centered = mesh;
  const Aabb3d box = bounds(centered);
  const Eigen::Vector3d center = box.center();
  double radius = 0.0;
  for (auto& p : centered.positions) {
    p -= center;
    radius = std::max(radius, p.norm());
  }
  if (radius <= 0.0) radius = 1.0;

  const auto cameras = fibonacciCameras(viewpoints, resolution, radius * 1.04);
  const auto vertexNormals = computeVertexNormals(centered);

  // One histogram per view chunk, merged afterwards; each view is rendered,
  // tallied and dropped to keep memory flat.
  using Histogram = std::vector<std::int64_t>;
  auto partials = parallelChunks<Histogram>(
      viewpoints, 1, [&](Histogram& counts, std::int64_t begin, std::int64_t end) {
        counts.assign(nf, 0);
        for (std::int64_t v = begin; v < end; ++v) {
          const RenderedView view = renderView(centered, vertexNormals, cameras[v], {});
          for (int f : view.face.data) {
            if (f >= 0) ++counts[f];
          }
        }
      });

  VisibilityMask mask;
  mask.hits.assign(nf, 0);
  for (const auto& counts : partials) {
    for (int f = 0; f < nf; ++f) mask.hits[f] += counts[f];
  }
  mask.state.resize(nf);
  for (int f = 0; f < nf; ++f) {
    mask.state[f] = mask.hits[f] > 0 ? FaceVisibility::Visible : FaceVisibility::Hidden;
  }
  return mask;
}

VisibilityMask promoteExterior(const TriangleMesh& mesh, const VisibilityMask& mask,
                               double cosThreshold) {
  if (static_cast<int>(mask.state.size()) != mesh.faceCount() ||
      mask.hits.size() != mask.state.size()) {
    throw Error(ErrorCode::ShapeMismatch, "visibility mask does not match the mesh");
  }

  const int nf = mesh.faceCount();
  std::vector<Eigen::Vector3d> normals(nf);
  for (int f = 0; f < nf; ++f) normals[f] = faceNormal(mesh, f);
  const auto adjacency = faceAdjacency(mesh);

  VisibilityMask out = mask;
  std::deque<int> frontier;
  for (int f = 0; f < nf; ++f) {
    if (out.state[f] == FaceVisibility::Visible) frontier.push_back(f);
  }

  // A hidden neighbor rejected from one frontier face stays eligible: it is
  // rechecked from every face that reaches it, so the result is the full
  // closure under accepting edges.
  while (!frontier.empty()) {
    const int f = frontier.front();
    frontier.pop_front();
    for (int g : adjacency[f]) {
      if (g < 0 || out.state[g] != FaceVisibility::Hidden) continue;
      if (normals[g].dot(normals[f]) >= cosThreshold) {
        out.state[g] = FaceVisibility::PromotedExterior;
        frontier.push_back(g);
      }
    }
  }
  return out;
}

TriangleMesh removeHidden(const TriangleMesh& mesh, const VisibilityMask& mask) {
  if (static_cast<int>(mask.state.size()) != mesh.faceCount()) {
    throw Error(ErrorCode::ShapeMismatch, "visibility mask does not match the mesh");
  }
  std::vector<std::uint8_t> keep(mesh.faceCount());
  bool any = false;
  bool all = true;
  for (int f = 0; f < mesh.faceCount(); ++f) {
    keep[f] = mask.keep(f) ? 1 : 0;
    any = any || keep[f];
    all = all && keep[f];
  }
  if (!any) throw Error(ErrorCode::AllHidden, "every face is occluded from all viewpoints");
  // Keep-all passes the mesh through untouched rather than renumbering
  // vertices in face-traversal order.
  if (all) return mesh;
  return extractFaces(mesh, keep);
}

TriangleMesh cullHiddenFaces(const TriangleMesh& mesh, int viewpoints, int resolution,
                             double cosThreshold) {
  VisibilityMask mask = castVisibility(mesh, viewpoints, resolution);
  mask = promoteExterior(mesh, mask, cosThreshold);
  return removeHidden(mesh, mask);
}

}  // namespace meshforge
