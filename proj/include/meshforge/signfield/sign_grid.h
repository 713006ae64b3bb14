#pragma once

#include <optional>
#include <vector>

#include "meshforge/core/aabb.h"
#include "meshforge/core/mesh.h"
#include "meshforge/spatial/bvh.h"

namespace meshforge {

enum class VoxelLabel : std::uint8_t { Unknown, SurfaceBand, DilatedBand, Exterior, Interior };

// Cubic voxel grid of per-voxel labels and unsigned distances. Voxel (x,y,z)
// is centered at origin + (x+0.5, y+0.5, z+0.5) * voxelSize; storage is
// x-fastest. Distances are exact up to `truncation` and clamped beyond it,
// which covers every voxel that can take part in an iso crossing.
struct SignGrid {
  int res = 0;
  double voxelSize = 0;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double truncation = 0;
  std::vector<VoxelLabel> labels;
  std::vector<float> distance;
  std::int64_t failOpenCount = 0;  // voxels resolved Exterior for lack of any labeled neighbor

  std::size_t cells() const { return static_cast<std::size_t>(res) * res * res; }
  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(res) * (y + static_cast<std::size_t>(res) * z);
  }
  Eigen::Vector3d voxelCenter(int x, int y, int z) const {
    return origin + voxelSize * Eigen::Vector3d(x + 0.5, y + 0.5, z + 0.5);
  }
  bool onBoundary(int x, int y, int z) const {
    return x == 0 || y == 0 || z == 0 || x == res - 1 || y == res - 1 || z == res - 1;
  }
  std::int64_t countLabel(VoxelLabel label) const;
};

struct GridParams {
  int resolution = 128;
  double bandVoxels = 1.0;  // SurfaceBand threshold in voxel units
  int dilateRadius = 2;     // sizes the margin and the distance truncation
  // When set, the grid covers this cube instead of auto-fitting the mesh;
  // the mesh must then keep at least 2 voxels of margin on every side.
  std::optional<Aabb3d> domain;
};

// Builds the grid and labels SurfaceBand wherever the voxel-center distance
// to the mesh is below the band threshold. All other voxels start Unknown.
SignGrid markSurfaceBand(const TriangleMesh& mesh, const Bvh& bvh, const GridParams& params);

// Chebyshev dilation of SurfaceBand by `radius` (26-neighborhood applied
// radius times); newly covered voxels become DilatedBand.
void dilateBand(SignGrid& grid, int radius);

// 6-connected flood from the grid boundary across Unknown voxels. Reached
// voxels become Exterior, unreached Unknown voxels become Interior; band
// labels are left in place.
void floodFillExterior(SignGrid& grid);

// Relabels every 6-connected Interior component smaller than
// maxFraction * total-interior-count back to Unknown.
void reopenSmallCavities(SignGrid& grid, double maxFraction);

// Assigns Exterior/Interior to every band and Unknown voxel by synchronous
// rounds of 6-neighbor majority vote (ties and unreachable voxels go
// Exterior; the latter are tallied in failOpenCount).
void resolveUndetermined(SignGrid& grid);

// distance * (+1 Exterior / -1 Interior); requires a fully resolved grid.
std::vector<float> signedField(const SignGrid& grid);

// Trilinear interpolation of the signed field at a world point, clamped to
// the voxel-center lattice.
double sampleSignedField(const SignGrid& grid, const std::vector<float>& field,
                         const Eigen::Vector3d& p);

}  // namespace meshforge
