#include "meshforge/core/mesh.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "meshforge/core/error.h"

namespace meshforge {

Aabb3d bounds(const TriangleMesh& m) {
  Aabb3d box;
  for (const auto& p : m.positions) box.extend(p);
  return box;
}

double surfaceArea(const TriangleMesh& m) {
  double area = 0;
  for (int f = 0; f < m.faceCount(); ++f) area += faceArea(m, f);
  return area;
}

std::vector<Eigen::Vector3d> computeVertexNormals(const TriangleMesh& m) {
  std::vector<Eigen::Vector3d> normals(m.positions.size(), Eigen::Vector3d::Zero());
  for (int f = 0; f < m.faceCount(); ++f) {
    Eigen::Vector3d an = faceAreaVector(m, f);
    for (int k = 0; k < 3; ++k) normals[m.faces[f][k]] += an;
  }
  for (auto& n : normals) {
    double len = n.norm();
    if (len > 0) n /= len;
  }
  return normals;
}

void validateMesh(const TriangleMesh& m) {
  if (m.faces.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no faces");
  for (const auto& p : m.positions) {
    if (!p.allFinite()) throw Error(ErrorCode::InvalidGeometry, "non-finite vertex coordinate");
  }
  for (const auto& f : m.faces) {
    for (int k = 0; k < 3; ++k) {
      if (f[k] < 0 || f[k] >= m.vertexCount())
        throw Error(ErrorCode::InvalidGeometry, "face index out of range");
    }
  }
}

double normalizeToSphere(TriangleMesh& m, double radius) {
  Aabb3d box = bounds(m);
  if (box.empty()) return 1.0;
  Eigen::Vector3d center = box.center();
  double maxR = 0;
  for (const auto& p : m.positions) maxR = std::max(maxR, (p - center).norm());
  double scale = maxR > 0 ? radius / maxR : 1.0;
  for (auto& p : m.positions) p = (p - center) * scale;
  return scale;
}

void normalizePairToUnitCube(TriangleMesh& a, TriangleMesh& b) {
  Aabb3d box = bounds(a);
  box.extend(bounds(b));
  if (box.empty()) return;
  double maxExtent = box.extent().maxCoeff();
  double scale = maxExtent > 0 ? 1.0 / maxExtent : 1.0;
  Eigen::Vector3d origin = box.min;
  for (auto& p : a.positions) p = (p - origin) * scale;
  for (auto& p : b.positions) p = (p - origin) * scale;
}

namespace {

struct EdgeUse {
  int forward = 0;   // traversals a->b with a < b
  int backward = 0;  // traversals b->a
};

}  // namespace

ManifoldReport checkClosedManifold(const TriangleMesh& m) {
  ManifoldReport report;
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(m.faces.size() * 3 / 2);
  std::vector<std::uint8_t> referenced(m.positions.size(), 0);
  for (const auto& f : m.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      referenced[a] = 1;
      auto& use = edges[edgeKey(a, b)];
      if (a < b)
        use.forward++;
      else
        use.backward++;
    }
  }
  report.closed = true;
  report.orientable = true;
  for (const auto& [key, use] : edges) {
    (void)key;
    int total = use.forward + use.backward;
    if (total == 1) report.boundaryEdges++;
    if (total > 2) report.nonManifoldEdges++;
    if (total != 2) report.closed = false;
    // Opposite traversal directions mean consistent winding across the edge.
    if (total == 2 && !(use.forward == 1 && use.backward == 1)) report.orientable = false;
  }
  std::int64_t v = 0;
  for (auto r : referenced) v += r;
  report.eulerCharacteristic = v - static_cast<std::int64_t>(edges.size()) + m.faceCount();
  return report;
}

std::vector<std::array<int, 3>> faceAdjacency(const TriangleMesh& m) {
  std::vector<std::array<int, 3>> adj(m.faces.size(), {-1, -1, -1});
  // edge key -> (face, corner) of the first unpaired incidence
  std::unordered_map<std::uint64_t, std::pair<int, int>> open;
  open.reserve(m.faces.size() * 3 / 2);
  for (int f = 0; f < m.faceCount(); ++f) {
    for (int k = 0; k < 3; ++k) {
      std::uint64_t key = edgeKey(m.faces[f][k], m.faces[f][(k + 1) % 3]);
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(key, std::make_pair(f, k));
      } else {
        adj[f][k] = it->second.first;
        adj[it->second.first][it->second.second] = f;
        open.erase(it);
      }
    }
  }
  return adj;
}

std::vector<std::uint8_t> boundaryVertices(const TriangleMesh& m) {
  std::vector<std::uint64_t> keys;
  keys.reserve(m.faces.size() * 3);
  for (int f = 0; f < m.faceCount(); ++f)
    for (int k = 0; k < 3; ++k) keys.push_back(edgeKey(m.faces[f][k], m.faces[f][(k + 1) % 3]));
  std::sort(keys.begin(), keys.end());
  std::vector<std::uint8_t> flags(m.positions.size(), 0);
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    if (j - i != 2) {
      flags[static_cast<int>(keys[i] >> 32)] = 1;
      flags[static_cast<int>(keys[i] & 0xffffffffu)] = 1;
    }
    i = j;
  }
  return flags;
}

TriangleMesh extractFaces(const TriangleMesh& m, const std::vector<std::uint8_t>& keep) {
  TriangleMesh out;
  std::vector<int> remap(m.positions.size(), -1);
  bool copyUvs = m.hasUvs();
  std::vector<int> uvRemap(copyUvs ? m.uvs.size() : 0, -1);
  for (int f = 0; f < m.faceCount(); ++f) {
    if (!keep[f]) continue;
    Eigen::Vector3i tri;
    for (int k = 0; k < 3; ++k) {
      int v = m.faces[f][k];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.positions.size());
        out.positions.push_back(m.positions[v]);
        if (m.hasNormals()) out.normals.push_back(m.normals[v]);
      }
      tri[k] = remap[v];
    }
    out.faces.push_back(tri);
    if (copyUvs) {
      Eigen::Vector3i triUv;
      for (int k = 0; k < 3; ++k) {
        int t = m.faceUvs[f][k];
        if (uvRemap[t] < 0) {
          uvRemap[t] = static_cast<int>(out.uvs.size());
          out.uvs.push_back(m.uvs[t]);
        }
        triUv[k] = uvRemap[t];
      }
      out.faceUvs.push_back(triUv);
    }
  }
  return out;
}

}  // namespace meshforge
