#pragma once

#include <vector>

#include "meshforge/core/mesh.h"

namespace meshforge {

// Extracts the iso-surface of a scalar field sampled at the voxel centers of
// a cubic grid (res^3 values, x-fastest, centers at origin + (i+0.5)*h).
// A sample is inside iff value < iso. The output is always a closed
// 2-manifold with outward-consistent winding: per cell, face contours are
// traced with the inside region kept to a fixed side, so neighboring cells
// agree on every shared edge. Throws EmptySurface when no cell crosses iso.
TriangleMesh extractIsosurface(const std::vector<float>& values, int res, double voxelSize,
                               const Eigen::Vector3d& origin, double iso = 0.0);

}  // namespace meshforge
