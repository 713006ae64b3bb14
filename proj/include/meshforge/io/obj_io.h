#pragma once

#include <string>

#include "meshforge/core/mesh.h"

namespace meshforge {

// Wavefront OBJ subset: v, vn, vt, f (tri faces, v or v/vt or v/vt/vn or
// v//vn references, negative indices allowed). Normals are kept only when
// every face corner carries one per-vertex-consistent normal index.
TriangleMesh readObj(const std::string& path);

// Floats are printed with max_digits10 so a write/read round trip is exact.
void writeObj(const std::string& path, const TriangleMesh& mesh);

}  // namespace meshforge
