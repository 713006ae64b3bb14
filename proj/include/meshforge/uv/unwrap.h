#pragma once

#include "meshforge/uv/charts.h"
#include "meshforge/uv/lscm.h"
#include "meshforge/uv/pack.h"

namespace meshforge {

struct UnwrapOptions {
  int atlasRes = 1024;
  int padding = 4;
  int partitions = 1;  // >1 segments per spatial partition, then reconciles
  int haloRings = 3;
  SegmentOptions segment;
  LscmOptions lscm;
};

struct UnwrapResult {
  // The input mesh with an atlas UV pool attached (uvs + faceUvs). Corners
  // of one vertex inside one chart share a UV index; chart seams duplicate.
  TriangleMesh mesh;
  // Final charts; cornerUvs are in normalized atlas space ([0,1] x [0,1]).
  std::vector<Chart> charts;
  AtlasLayout layout;
};

// Full unwrap: segment into charts, flatten each conformally, pack into one
// atlas, and attach the resulting UVs to the mesh.
UnwrapResult unwrapMesh(const TriangleMesh& mesh, const UnwrapOptions& options = {});

}  // namespace meshforge
