#include "meshforge/signfield/watertight.h"

#include "meshforge/core/error.h"
#include "meshforge/signfield/marching_cubes.h"

namespace meshforge {

WatertightResult makeWatertight(const TriangleMesh& input, const WatertightParams& params) {
  validateMesh(input);
  Bvh bvh(input);

  GridParams gp;
  gp.resolution = params.resolution;
  gp.bandVoxels = params.bandVoxels;
  gp.dilateRadius = params.dilateRadius;

  WatertightResult result;
  result.grid = markSurfaceBand(input, bvh, gp);
  dilateBand(result.grid, params.dilateRadius);
  floodFillExterior(result.grid);
  reopenSmallCavities(result.grid, params.cavityFraction);
  resolveUndetermined(result.grid);
  result.field = signedField(result.grid);
  result.mesh =
      extractIsosurface(result.field, result.grid.res, result.grid.voxelSize, result.grid.origin);
  return result;
}

std::vector<double> sampleSdf(const WatertightResult& wt, const Bvh& watertightBvh,
                              const std::vector<Eigen::Vector3d>& points) {
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double magnitude = watertightBvh.closestPoint(points[i]).distance();
    double sign = sampleSignedField(wt.grid, wt.field, points[i]) < 0 ? -1.0 : 1.0;
    values[i] = sign * magnitude;
  }
  return values;
}

}  // namespace meshforge
