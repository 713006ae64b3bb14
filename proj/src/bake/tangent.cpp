#include "meshforge/bake/tangent.h"

#include <Eigen/Geometry>
#include <cmath>
#include <unordered_map>

#include "meshforge/core/error.h"

namespace meshforge {

Eigen::Vector3d anyPerpendicular(const Eigen::Vector3d& n) {
  int smallest = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(n[k]) < std::abs(n[smallest])) smallest = k;
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();
  axis[smallest] = 1.0;
  Eigen::Vector3d p = axis.cross(n);
  double len = p.norm();
  return len > 1e-20 ? Eigen::Vector3d(p / len) : Eigen::Vector3d::UnitX();
}

std::vector<std::array<TangentFrame, 3>> computeWedgeTangents(const TriangleMesh& mesh) {
  if (!mesh.hasUvs())
    throw Error(ErrorCode::InvalidGeometry, "tangent frames require a UV-mapped mesh");

  std::vector<Eigen::Vector3d> normals =
      mesh.hasNormals() ? mesh.normals : computeVertexNormals(mesh);
  for (auto& n : normals) {
    double len = n.norm();
    if (len > 1e-20) n /= len;
  }

  auto wedgeKey = [](int v, int uv) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 32) |
           static_cast<std::uint32_t>(uv);
  };
  std::unordered_map<std::uint64_t, Eigen::Vector3d> accumulated;
  accumulated.reserve(mesh.positions.size() * 2);

  for (int f = 0; f < mesh.faceCount(); ++f) {
    const auto& tri = mesh.faces[f];
    const auto& uvTri = mesh.faceUvs[f];
    const Eigen::Vector3d& p0 = mesh.positions[tri[0]];
    const Eigen::Vector3d& p1 = mesh.positions[tri[1]];
    const Eigen::Vector3d& p2 = mesh.positions[tri[2]];
    Eigen::Vector2d d1 = mesh.uvs[uvTri[1]] - mesh.uvs[uvTri[0]];
    Eigen::Vector2d d2 = mesh.uvs[uvTri[2]] - mesh.uvs[uvTri[0]];
    double det = d1.x() * d2.y() - d2.x() * d1.y();
    if (std::abs(det) < 1e-20) continue;
    Eigen::Vector3d faceTangent = ((p1 - p0) * d2.y() - (p2 - p0) * d1.y()) / det;

    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d& self = mesh.positions[tri[k]];
      Eigen::Vector3d ea = mesh.positions[tri[(k + 1) % 3]] - self;
      Eigen::Vector3d eb = mesh.positions[tri[(k + 2) % 3]] - self;
      double la = ea.norm(), lb = eb.norm();
      if (la < 1e-20 || lb < 1e-20) continue;
      double angle = std::acos(std::clamp(ea.dot(eb) / (la * lb), -1.0, 1.0));
      // try_emplace: Eigen default-constructs uninitialized, so zero explicitly.
      auto slot = accumulated.try_emplace(wedgeKey(tri[k], uvTri[k]), Eigen::Vector3d::Zero());
      slot.first->second += angle * faceTangent;
    }
  }

  std::vector<std::array<TangentFrame, 3>> frames(mesh.faceCount());
  for (int f = 0; f < mesh.faceCount(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int v = mesh.faces[f][k];
      TangentFrame& frame = frames[f][k];
      frame.normal = normals[v];
      if (frame.normal.norm() < 1e-20) frame.normal = Eigen::Vector3d::UnitZ();
      Eigen::Vector3d t = Eigen::Vector3d::Zero();
      auto it = accumulated.find(wedgeKey(v, mesh.faceUvs[f][k]));
      if (it != accumulated.end()) t = it->second;
      t -= frame.normal * frame.normal.dot(t);
      double len = t.norm();
      frame.tangent = len > 1e-12 ? Eigen::Vector3d(t / len) : anyPerpendicular(frame.normal);
      frame.bitangent = frame.normal.cross(frame.tangent);
    }
  }
  return frames;
}

}  // namespace meshforge
