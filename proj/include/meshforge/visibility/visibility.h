#pragma once

#include <cstdint>
#include <vector>

#include "meshforge/core/mesh.h"

namespace meshforge {

enum class FaceVisibility : std::uint8_t { Hidden = 0, Visible = 1, PromotedExterior = 2 };

// Per-face classification from multi-view ray casting. Visible faces won at
// least one pixel; promoted faces won none but connect to a visible face
// through edges whose normals agree.
struct VisibilityMask {
  std::vector<FaceVisibility> state;
  std::vector<std::int64_t> hits;

  bool keep(int face) const { return state[face] != FaceVisibility::Hidden; }
  std::int64_t countState(FaceVisibility s) const {
    std::int64_t n = 0;
    for (auto v : state)
      if (v == s) ++n;
    return n;
  }
};

// Rasterizes the mesh from orthographic viewpoints on a golden-spiral sphere
// sized to the mesh bounding sphere and counts, per face, the pixels it wins.
// A face is Visible iff it wins at least one pixel in at least one view.
// Exterior-correct by construction: each pixel keeps the surface point
// closest to the camera along the full ray line, so occluded interiors
// cannot win.
VisibilityMask castVisibility(const TriangleMesh& mesh, int viewpoints = 512,
                              int resolution = 1024);

// Breadth-first flood across mesh edges from all Visible faces. A hidden
// neighbor is promoted iff its unit face normal agrees with the CURRENT
// frontier face's normal: dot >= cosThreshold. Comparing against the local
// frontier (not the original seed) lets promotion follow smooth curvature all
// the way around a shape while still refusing opposite-winding shells.
// The result is the reachability closure, so it does not depend on traversal
// order, and lowering the threshold never shrinks the promoted set.
VisibilityMask promoteExterior(const TriangleMesh& mesh, const VisibilityMask& mask,
                               double cosThreshold = 0.5);

// Keeps exactly the Visible and PromotedExterior faces, preserving face
// order and dropping unreferenced vertices. Throws AllHidden if nothing
// survives.
TriangleMesh removeHidden(const TriangleMesh& mesh, const VisibilityMask& mask);

// Full stage: cast, promote, remove.
TriangleMesh cullHiddenFaces(const TriangleMesh& mesh, int viewpoints = 512,
                             int resolution = 1024, double cosThreshold = 0.5);

}  // namespace meshforge
