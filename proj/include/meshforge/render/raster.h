#pragma once

#include <cstdint>
#include <vector>

#include "meshforge/core/image.h"
#include "meshforge/core/mesh.h"
#include "meshforge/render/camera.h"

namespace meshforge {

// One view's geometry buffers. Background texels carry depth +inf, face -1,
// and zero position/normal; every foreground texel satisfies
// depth == dot(position, -direction) up to f32 rounding.
struct RenderedView {
  ImageF position;  // 3 channels, world space
  ImageF normal;    // 3 channels, interpolated unit vertex normals
  ImageF depth;     // 1 channel, larger = closer to the camera
  Image<std::int32_t> face;  // 1 channel, source face index

  bool foreground(int x, int y) const { return face.at(x, y) >= 0; }
};

struct ViewSet {
  std::vector<OrthoCamera> cameras;
  std::vector<RenderedView> views;
};

struct RasterOptions {
  // Skip faces whose geometric normal points away from the camera. Off by
  // default: a z-buffer over a closed mesh resolves to front faces anyway.
  bool backfaceCull = false;
};

// Rasterizes one view by intersecting each candidate pixel ray with the
// triangle (exact ray casting over the triangle's pixel bounding box, shared
// predicate with the Bvh module). The z-test keeps the largest depth; ties
// keep the lowest face index. `vertexNormals` must be per-vertex.
RenderedView renderView(const TriangleMesh& mesh,
                        const std::vector<Eigen::Vector3d>& vertexNormals,
                        const OrthoCamera& camera, const RasterOptions& options = {});

// Renders every camera. Uses the mesh's own normals when present, otherwise
// area-weighted smooth normals.
ViewSet renderGeometry(const TriangleMesh& mesh, const std::vector<OrthoCamera>& cameras,
                       const RasterOptions& options = {});

}  // namespace meshforge
