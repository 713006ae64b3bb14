#pragma once

#include "meshforge/signfield/sign_grid.h"

namespace meshforge {

struct WatertightParams {
  int resolution = 128;
  int dilateRadius = 2;
  double bandVoxels = 1.0;
  double cavityFraction = 0.01;
};

struct WatertightResult {
  TriangleMesh mesh;   // closed 2-manifold iso-surface
  SignGrid grid;       // fully resolved labels + distances
  std::vector<float> field;  // signed distances at voxel centers
};

// Full repair chain: band marking, dilation, exterior flood, cavity
// reopening, neighbor-vote resolution, iso-surface extraction. Works on
// meshes with holes and inconsistent winding.
WatertightResult makeWatertight(const TriangleMesh& input, const WatertightParams& params);

// Signed distance at arbitrary points: magnitude from the closest point on
// the watertight mesh, sign from the interpolated grid field.
std::vector<double> sampleSdf(const WatertightResult& wt, const Bvh& watertightBvh,
                              const std::vector<Eigen::Vector3d>& points);

}  // namespace meshforge
