#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "meshforge/core/mesh.h"

namespace meshforge {

// A connected patch of faces destined for one atlas island. Faces are mesh
// face indices in ascending order. cornerUvs (parallel to faces, one 2-vector
// per corner) appear after parameterization; empty before.
struct Chart {
  std::vector<int> faces;
  std::vector<std::array<Eigen::Vector2d, 3>> cornerUvs;

  bool parameterized() const { return cornerUvs.size() == faces.size(); }
};

struct SegmentOptions {
  double costCutoff = 0.35;        // growth stops past this normal-compatibility cost
  double creaseDihedralDeg = 70;   // edges bending more than this are creases
  double creasePenalty = 2.0;      // crease cost multiplier on (1 - dot) across the edge
  double mergeConeDeg = 45;        // merged charts must keep normals within this half-angle
};

// Greedy chart growth: a priority queue admits the cheapest frontier face,
// where cost = 1 - dot(face normal, chart mean normal), plus
// creasePenalty * (1 - dot(face normal, frontier neighbor normal)) when the
// crossed edge's dihedral exceeds creaseDihedralDeg. Growth stops at
// costCutoff. The first seed is the lowest face index; each later seed is
// the unassigned face farthest (edge-graph distance) from all assigned
// faces. Ends with the pairwise merge pass. Deterministic.
std::vector<Chart> segmentCharts(const TriangleMesh& mesh, const SegmentOptions& options = {});

// Iterates the five merge criteria to a fixpoint:
//   1. a 1-face chart is absorbed across its longest shared edge,
//   2. a 2-face quad chart is absorbed by the neighbor sharing the most
//      boundary,
//   3. a chart whose whole boundary touches exactly one neighbor chart is
//      absorbed by it,
//   4. a pair sharing more than half of the smaller chart's boundary length
//      merges,
//   5. any merge is vetoed unless the merged normal cone's half-angle stays
//      under mergeConeDeg.
// Face sets are preserved; only the grouping changes. Deterministic.
std::vector<Chart> mergePass(std::vector<Chart> charts, const TriangleMesh& mesh,
                             const SegmentOptions& options = {});

// Spatial piece of the parallel segmentation: core face sets partition the
// mesh; the halo is the faces within `rings` edge-hops outside the core.
struct MeshPartition {
  std::vector<int> core;
  std::vector<int> halo;
};

// Recursive bisection into `count` pieces: each split divides a piece's
// faces by the median along the centroid axis of maximum spread, balancing
// summed face area.
std::vector<MeshPartition> partitionMesh(const TriangleMesh& mesh, int count);

// Fills in MeshPartition::halo via BFS from the core boundary.
void extractHalos(const TriangleMesh& mesh, std::vector<MeshPartition>& partitions, int rings);

// Partition-with-overlap segmentation: bisect, extract halos, run
// segmentCharts per partition on core + halo, then reconcile: core faces
// keep their owner's chart, fragments of at most 2 faces move to the
// neighboring chart with the closest mean normal, and a final global merge
// pass consolidates across partition boundaries. partitions = 1 falls
// through to segmentCharts and matches it exactly.
std::vector<Chart> segmentParallel(const TriangleMesh& mesh, int partitions, int haloRings = 3,
                                   const SegmentOptions& options = {});

}  // namespace meshforge
