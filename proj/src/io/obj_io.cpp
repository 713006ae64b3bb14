#include "meshforge/io/obj_io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "meshforge/core/error.h"

namespace meshforge {

namespace {

// Parses one face corner "v", "v/vt", "v/vt/vn" or "v//vn". Missing fields
// stay 0; OBJ indices are 1-based so 0 means absent.
void parseCorner(std::string_view token, int& v, int& vt, int& vn) {
  v = vt = vn = 0;
  int field = 0;
  int* slots[3] = {&v, &vt, &vn};
  std::size_t pos = 0;
  while (pos <= token.size() && field < 3) {
    std::size_t next = token.find('/', pos);
    std::string_view part =
        token.substr(pos, next == std::string_view::npos ? next : next - pos);
    if (!part.empty()) {
      std::from_chars(part.data(), part.data() + part.size(), *slots[field]);
    }
    if (next == std::string_view::npos) break;
    pos = next + 1;
    ++field;
  }
}

int resolveIndex(int raw, std::size_t count, const char* what) {
  // Negative indices count back from the current end of the list.
  int idx = raw > 0 ? raw - 1 : static_cast<int>(count) + raw;
  if (idx < 0 || idx >= static_cast<int>(count))
    throw Error(ErrorCode::InvalidGeometry, std::string("obj ") + what + " index out of range");
  return idx;
}

}  // namespace

TriangleMesh readObj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

  TriangleMesh mesh;
  std::vector<Eigen::Vector3d> normalPool;
  std::vector<std::array<int, 3>> faceNormalIdx;
  bool allCornersHaveNormals = true;
  bool allCornersHaveUvs = true;

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      Eigen::Vector3d p;
      ss >> p.x() >> p.y() >> p.z();
      mesh.positions.push_back(p);
    } else if (tag == "vt") {
      Eigen::Vector2d t;
      ss >> t.x() >> t.y();
      mesh.uvs.push_back(t);
    } else if (tag == "vn") {
      Eigen::Vector3d n;
      ss >> n.x() >> n.y() >> n.z();
      normalPool.push_back(n);
    } else if (tag == "f") {
      std::vector<std::array<int, 3>> corners;  // resolved v, vt, vn (vt/vn may be -1)
      std::string token;
      while (ss >> token) {
        int v, vt, vn;
        parseCorner(token, v, vt, vn);
        std::array<int, 3> c;
        c[0] = resolveIndex(v, mesh.positions.size(), "vertex");
        c[1] = vt != 0 ? resolveIndex(vt, mesh.uvs.size(), "uv") : -1;
        c[2] = vn != 0 ? resolveIndex(vn, normalPool.size(), "normal") : -1;
        corners.push_back(c);
      }
      if (corners.size() < 3)
        throw Error(ErrorCode::InvalidGeometry, "obj face with fewer than 3 corners");
      // Fan-triangulate polygons.
      for (std::size_t k = 2; k < corners.size(); ++k) {
        const std::array<int, 3> tri[3] = {corners[0], corners[k - 1], corners[k]};
        mesh.faces.emplace_back(tri[0][0], tri[1][0], tri[2][0]);
        if (tri[0][1] >= 0 && tri[1][1] >= 0 && tri[2][1] >= 0)
          mesh.faceUvs.emplace_back(tri[0][1], tri[1][1], tri[2][1]);
        else
          allCornersHaveUvs = false;
        if (tri[0][2] >= 0 && tri[1][2] >= 0 && tri[2][2] >= 0)
          faceNormalIdx.push_back({tri[0][2], tri[1][2], tri[2][2]});
        else
          allCornersHaveNormals = false;
      }
    }
  }

  if (!allCornersHaveUvs || mesh.faceUvs.size() != mesh.faces.size()) {
    mesh.uvs.clear();
    mesh.faceUvs.clear();
  }

  // Per-vertex normals are kept only when every corner referencing a vertex
  // names the same normal; wedge-split normals are dropped.
  if (allCornersHaveNormals && faceNormalIdx.size() == mesh.faces.size() &&
      !faceNormalIdx.empty()) {
    std::vector<int> vertexNormal(mesh.positions.size(), -1);
    bool consistent = true;
    for (std::size_t f = 0; f < mesh.faces.size() && consistent; ++f) {
      for (int k = 0; k < 3; ++k) {
        int v = mesh.faces[f][k];
        int n = faceNormalIdx[f][k];
        if (vertexNormal[v] < 0)
          vertexNormal[v] = n;
        else if (vertexNormal[v] != n) {
          consistent = false;
          break;
        }
      }
    }
    if (consistent) {
      mesh.normals.assign(mesh.positions.size(), Eigen::Vector3d::UnitZ());
      for (std::size_t v = 0; v < mesh.positions.size(); ++v)
        if (vertexNormal[v] >= 0) mesh.normals[v] = normalPool[vertexNormal[v]];
    }
  }

  if (mesh.positions.empty()) throw Error(ErrorCode::EmptyMesh, "obj has no vertices: " + path);
  return mesh;
}

void writeObj(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.precision(std::numeric_limits<double>::max_digits10);

  for (const auto& p : mesh.positions) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& t : mesh.uvs) out << "vt " << t.x() << ' ' << t.y() << '\n';
  for (const auto& n : mesh.normals)
    out << "vn " << n.x() << ' ' << n.y() << ' ' << n.z() << '\n';

  bool withUvs = mesh.hasUvs();
  bool withNormals = mesh.hasNormals();
  for (int f = 0; f < mesh.faceCount(); ++f) {
    out << 'f';
    for (int k = 0; k < 3; ++k) {
      int v = mesh.faces[f][k] + 1;
      out << ' ' << v;
      if (withUvs) {
        out << '/' << mesh.faceUvs[f][k] + 1;
        if (withNormals) out << '/' << v;
      } else if (withNormals) {
        out << "//" << v;
      }
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

}  // namespace meshforge
