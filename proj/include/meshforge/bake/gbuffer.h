#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "meshforge/core/image.h"
#include "meshforge/core/mesh.h"

namespace meshforge {

// Per-texel surface attributes of a UV-mapped mesh, rasterized into its own
// atlas. Texel (x, y) covers uv = ([x, x+1]/res, [y, y+1]/res) with v running
// down the rows; attributes are sampled at the texel center. For valid texels
// {tangent, bitangent, normal} is right-handed orthonormal (within 1e-3 after
// the float round-trip); invalid texels carry no meaningful data.
struct GBuffer {
  int resolution = 0;
  std::vector<Eigen::Vector3f> position;   // world space
  std::vector<Eigen::Vector3f> normal;     // interpolated smooth normal, unit
  std::vector<Eigen::Vector3f> tangent;    // unit, perpendicular to normal
  std::vector<Eigen::Vector3f> bitangent;  // normal x tangent
  std::vector<std::uint8_t> valid;         // center lies inside a UV triangle
  std::vector<std::uint8_t> reliable;      // source face UVs trustworthy

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * resolution + x;
  }
  bool empty() const { return valid.empty(); }
};

// Rasterizes the mesh into its UV atlas. A texel is valid iff its center lies
// inside exactly one UV triangle; shared-edge centers resolve to one owner by
// a top-left fill rule evaluated on canonical edge functions, so neighboring
// triangles of one chart can never both claim a texel. A texel claimed by two
// unrelated triangles (overlapping charts) raises AtlasOverlap.
//
// A face's texels are flagged unreliable when its UV area is below 1e-8 of
// the atlas or its UV-to-surface area ratio is more than 100x away from its
// chart's median ratio (charts recovered as UV-connected islands).
GBuffer rasterizeGBuffer(const TriangleMesh& lowpoly, int resolution);

// Bakes a tangent-space normal map: each valid texel looks up the closest
// point on the detail mesh and re-expresses that surface's smooth normal in
// the texel's tangent frame, encoded round((n+1)/2 * 255) into RGB8. Texels
// that are unreliable, farther than maxDistanceFraction * bboxDiagonal from
// the detail surface, or invalid get the neutral encodings (0,0,1) / zero.
ImageU8 transferNormals(const GBuffer& gbuffer, const TriangleMesh& highpoly,
                        double bboxDiagonal, double maxDistanceFraction = 0.01);

// Pushes valid texel values outward so bilinear lookups and mipmaps straddling
// chart borders stay plausible: every invalid texel within `radius` (chebyshev)
// of a valid one takes the value of its nearest valid texel (euclidean,
// 8-neighbor chamfer propagation). Valid texels are untouched.
ImageU8 dilateSeams(const ImageU8& map, const GBuffer& gbuffer, int radius = 4);

}  // namespace meshforge
