#include "meshforge/signfield/marching_cubes.h"

#include <unordered_map>

#include "meshforge/core/error.h"

namespace meshforge {

namespace {

// Cell corners are numbered by coordinate bits (bit0 = +x, bit1 = +y,
// bit2 = +z). The 12 cube edges, each as (low corner, high corner, axis).
const int kEdgeCorners[12][3] = {
    {0, 1, 0}, {2, 3, 0}, {4, 5, 0}, {6, 7, 0},  // x edges
    {0, 2, 1}, {1, 3, 1}, {4, 6, 1}, {5, 7, 1},  // y edges
    {0, 4, 2}, {1, 5, 2}, {2, 6, 2}, {3, 7, 2},  // z edges
};

// Corner loops of the 6 cell faces, counterclockwise when viewed from
// outside the cell (loop normal = outward).
const int kFaceCorners[6][4] = {
    {0, 4, 6, 2},  // -x
    {1, 3, 7, 5},  // +x
    {0, 1, 5, 4},  // -y
    {2, 6, 7, 3},  // +y
    {0, 2, 3, 1},  // -z
    {4, 5, 7, 6},  // +z
};

// Directed contour segments per face, indexed by the 4-bit inside mask of
// the face corners (bit j = corner j of the loop). Entries are pairs of
// face-edge indices (edge j runs corner j -> j+1); -1 terminates. Segments
// keep the inside region on the left when viewed from outside, and the
// two-diagonal cases separate the inside corners.
const std::int8_t kFaceSegments[16][4] = {
    {-1, -1, -1, -1},  // 0000
    {0, 3, -1, -1},    // 0001
    {1, 0, -1, -1},    // 0010
    {1, 3, -1, -1},    // 0011
    {2, 1, -1, -1},    // 0100
    {0, 3, 2, 1},      // 0101 diagonal
    {2, 0, -1, -1},    // 0110
    {2, 3, -1, -1},    // 0111
    {3, 2, -1, -1},    // 1000
    {0, 2, -1, -1},    // 1001
    {1, 0, 3, 2},      // 1010 diagonal
    {1, 2, -1, -1},    // 1011
    {3, 1, -1, -1},    // 1100
    {0, 1, -1, -1},    // 1101
    {3, 0, -1, -1},    // 1110
    {-1, -1, -1, -1},  // 1111
};

// Maps an unordered cell-corner pair to the canonical cube edge index.
int cubeEdgeFromCorners(int a, int b) {
  for (int e = 0; e < 12; ++e)
    if ((kEdgeCorners[e][0] == a && kEdgeCorners[e][1] == b) ||
        (kEdgeCorners[e][0] == b && kEdgeCorners[e][1] == a))
      return e;
  return -1;
}

struct EdgeTables {
  int faceEdgeToCube[6][4];
  EdgeTables() {
    for (int f = 0; f < 6; ++f)
      for (int j = 0; j < 4; ++j)
        faceEdgeToCube[f][j] =
            cubeEdgeFromCorners(kFaceCorners[f][j], kFaceCorners[f][(j + 1) % 4]);
  }
};

const EdgeTables kTables;

}  // namespace

TriangleMesh extractIsosurface(const std::vector<float>& values, int res, double voxelSize,
                               const Eigen::Vector3d& origin, double iso) {
  if (res < 2 || values.size() != static_cast<std::size_t>(res) * res * res)
    throw Error(ErrorCode::ShapeMismatch, "field size does not match resolution");

  auto value = [&](int x, int y, int z) -> double {
    return values[static_cast<std::size_t>(x) +
                  static_cast<std::size_t>(res) * (y + static_cast<std::size_t>(res) * z)];
  };
  auto center = [&](int x, int y, int z) -> Eigen::Vector3d {
    return origin + voxelSize * Eigen::Vector3d(x + 0.5, y + 0.5, z + 0.5);
  };

  TriangleMesh out;
  // Crossing vertices are deduplicated across cells by the global lattice
  // edge they live on: axis plus the lattice coordinates of the low corner.
  std::unordered_map<std::uint64_t, int> edgeVertex;
  edgeVertex.reserve(1 << 16);

  auto crossing = [&](int axis, int x, int y, int z) -> int {
    std::uint64_t key =
        (((static_cast<std::uint64_t>(axis) * res + z) * res + y) * res + x);
    auto [it, inserted] = edgeVertex.try_emplace(key, -1);
    if (inserted) {
      int nx = x + (axis == 0), ny = y + (axis == 1), nz = z + (axis == 2);
      double v0 = value(x, y, z), v1 = value(nx, ny, nz);
      // Both cells sharing the edge see the same v0/v1, so the position is
      // identical wherever it is first computed. Clamping keeps crossing
      // vertices off the lattice corners, which preserves manifoldness when
      // a sample equals iso exactly.
      double t = std::clamp((iso - v0) / (v1 - v0), 1e-4, 1.0 - 1e-4);
      Eigen::Vector3d p = center(x, y, z);
      p[axis] += t * voxelSize;
      it->second = static_cast<int>(out.positions.size());
      out.positions.push_back(p);
    }
    return it->second;
  };

  int corners[8][3];
  for (int z = 0; z + 1 < res; ++z) {
    for (int y = 0; y + 1 < res; ++y) {
      for (int x = 0; x + 1 < res; ++x) {
        int insideMask = 0;
        for (int c = 0; c < 8; ++c) {
          corners[c][0] = x + (c & 1);
          corners[c][1] = y + ((c >> 1) & 1);
          corners[c][2] = z + ((c >> 2) & 1);
          if (value(corners[c][0], corners[c][1], corners[c][2]) < iso) insideMask |= 1 << c;
        }
        if (insideMask == 0 || insideMask == 0xFF) continue;

        // outgoing[e] = cube edge the contour continues to after the
        // crossing on cube edge e; -1 where no segment starts.
        int outgoing[12];
        for (int e = 0; e < 12; ++e) outgoing[e] = -1;
        bool anySegment = false;
        for (int f = 0; f < 6; ++f) {
          int faceMask = 0;
          for (int j = 0; j < 4; ++j)
            if (insideMask & (1 << kFaceCorners[f][j])) faceMask |= 1 << j;
          const std::int8_t* seg = kFaceSegments[faceMask];
          for (int s = 0; s < 4 && seg[s] >= 0; s += 2) {
            int from = kTables.faceEdgeToCube[f][seg[s]];
            int to = kTables.faceEdgeToCube[f][seg[s + 1]];
            outgoing[from] = to;
            anySegment = true;
          }
        }
        if (!anySegment) continue;

        // Walk the disjoint cycles of `outgoing` and triangulate each loop.
        bool used[12] = {};
        for (int start = 0; start < 12; ++start) {
          if (outgoing[start] < 0 || used[start]) continue;
          int loop[12];
          int loopLen = 0;
          int e = start;
          do {
            used[e] = true;
            const int* lc = kEdgeCorners[e];
            int axis = lc[2];
            loop[loopLen++] = crossing(axis, corners[lc[0]][0], corners[lc[0]][1],
                                       corners[lc[0]][2]);
            e = outgoing[e];
          } while (e != start && loopLen < 12);

          // Walk order winds clockwise seen from outside the solid, so
          // reverse it to emit outward-facing triangles.
          if (loopLen == 3) {
            out.faces.emplace_back(loop[0], loop[2], loop[1]);
          } else if (loopLen > 3) {
            // Fan around the loop centroid; the extra vertex keeps larger
            // (possibly non-planar) loops well shaped.
            Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
            for (int i = 0; i < loopLen; ++i) centroid += out.positions[loop[i]];
            centroid /= loopLen;
            int centerIdx = static_cast<int>(out.positions.size());
            out.positions.push_back(centroid);
            for (int i = 0; i < loopLen; ++i)
              out.faces.emplace_back(centerIdx, loop[(i + 1) % loopLen], loop[i]);
          }
        }
      }
    }
  }

  if (out.faces.empty()) throw Error(ErrorCode::EmptySurface, "no iso crossings in the field");
  return out;
}

}  // namespace meshforge
