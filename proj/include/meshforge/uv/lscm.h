#pragma once

#include "meshforge/uv/charts.h"

namespace meshforge {

struct LscmOptions {
  // A chart that is not a topological disk (or whose solve fails or folds
  // over) is split in two and retried; this bounds the retry depth.
  int maxDepth = 8;
};

// Flattens a chart into the plane with a least-squares conformal map.
//
// Two boundary vertices at maximum mutual 3D distance are pinned to (0, 0)
// and (d, 0); the remaining coordinates minimize the conformal residual,
// each triangle contributing two rows weighted by 1/sqrt(2 * area). The
// solution is scaled so total UV area equals total 3D area and translated
// so the bounding box starts at the origin. A solve whose faces all come
// out inverted is mirrored instead of rejected.
//
// Charts that cannot be flattened directly (not a disk, singular system,
// mixed-orientation result) are bisected along the widest centroid axis
// and each half is retried, so one chart in can yield several charts out.
// Exceeding options.maxDepth throws ErrorCode::ChartFailure.
std::vector<Chart> parameterizeLscm(const TriangleMesh& mesh, const Chart& chart,
                                    const LscmOptions& options = {});

}  // namespace meshforge
