#include "support/fixtures.h"

#include <cmath>
#include <map>
#include <numbers>

#include "meshforge/core/rng.h"

namespace meshforge::fixtures {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TriangleMesh icosphere(int subdivisions, double radius, const Eigen::Vector3d& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.positions = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                 {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  int icoFaces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& f : icoFaces) m.faces.emplace_back(f[0], f[1], f[2]);

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::uint64_t, int> midpoints;
    auto midpoint = [&](int a, int b) {
      auto [it, inserted] = midpoints.try_emplace(edgeKey(a, b), -1);
      if (inserted) {
        it->second = static_cast<int>(m.positions.size());
        m.positions.push_back((m.positions[a] + m.positions[b]) * 0.5);
      }
      return it->second;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      int ab = midpoint(f[0], f[1]);
      int bc = midpoint(f[1], f[2]);
      int ca = midpoint(f[2], f[0]);
      next.emplace_back(f[0], ab, ca);
      next.emplace_back(f[1], bc, ab);
      next.emplace_back(f[2], ca, bc);
      next.emplace_back(ab, bc, ca);
    }
    m.faces = std::move(next);
  }

  for (auto& p : m.positions) p = center + p.normalized() * radius;
  return m;
}

TriangleMesh uvSphere(int stacks, int slices, double radius, const Eigen::Vector3d& center) {
  TriangleMesh m;
  int top = 0;
  m.positions.push_back(center + Eigen::Vector3d(0, 0, radius));
  // Interior rings, stack index 1 .. stacks-1.
  for (int s = 1; s < stacks; ++s) {
    double theta = kPi * s / stacks;
    for (int l = 0; l < slices; ++l) {
      double phi = 2.0 * kPi * l / slices;
      m.positions.push_back(center + radius * Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                                                              std::sin(theta) * std::sin(phi),
                                                              std::cos(theta)));
    }
  }
  int bottom = static_cast<int>(m.positions.size());
  m.positions.push_back(center + Eigen::Vector3d(0, 0, -radius));

  auto ring = [&](int s, int l) { return 1 + (s - 1) * slices + (l % slices); };
  for (int l = 0; l < slices; ++l) m.faces.emplace_back(top, ring(1, l), ring(1, l + 1));
  for (int s = 1; s < stacks - 1; ++s) {
    for (int l = 0; l < slices; ++l) {
      int a = ring(s, l), b = ring(s, l + 1), c = ring(s + 1, l), d = ring(s + 1, l + 1);
      m.faces.emplace_back(a, c, d);
      m.faces.emplace_back(a, d, b);
    }
  }
  for (int l = 0; l < slices; ++l)
    m.faces.emplace_back(bottom, ring(stacks - 1, l + 1), ring(stacks - 1, l));
  return m;
}

TriangleMesh torus(int majorSegments, int minorSegments, double majorRadius, double minorRadius) {
  TriangleMesh m;
  for (int i = 0; i < majorSegments; ++i) {
    double u = 2.0 * kPi * i / majorSegments;
    Eigen::Vector3d ringCenter(majorRadius * std::cos(u), majorRadius * std::sin(u), 0);
    Eigen::Vector3d radial(std::cos(u), std::sin(u), 0);
    for (int j = 0; j < minorSegments; ++j) {
      double v = 2.0 * kPi * j / minorSegments;
      m.positions.push_back(ringCenter + minorRadius * (std::cos(v) * radial +
                                                        std::sin(v) * Eigen::Vector3d::UnitZ()));
    }
  }
  auto idx = [&](int i, int j) {
    return (i % majorSegments) * minorSegments + (j % minorSegments);
  };
  for (int i = 0; i < majorSegments; ++i) {
    for (int j = 0; j < minorSegments; ++j) {
      int a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
      m.faces.emplace_back(a, b, c);
      m.faces.emplace_back(a, c, d);
    }
  }
  return m;
}

TriangleMesh box(const Eigen::Vector3d& halfExtents, int n) {
  TriangleMesh m;
  std::map<std::array<long long, 3>, int> dedup;
  auto vertex = [&](const Eigen::Vector3d& p) {
    // Grid points are exact multiples of half-extent / n, so integer keys
    // dedup shared cube edges and corners reliably.
    std::array<long long, 3> key;
    for (int k = 0; k < 3; ++k) key[k] = std::llround(p[k] / halfExtents[k] * n * 2);
    auto [it, inserted] = dedup.try_emplace(key, -1);
    if (inserted) {
      it->second = static_cast<int>(m.positions.size());
      m.positions.push_back(p);
    }
    return it->second;
  };
  // For each face: origin corner plus two edge vectors chosen so the normal
  // (du x dv) points outward.
  struct Side {
    Eigen::Vector3d origin, du, dv;
  };
  Eigen::Vector3d h = halfExtents;
  std::vector<Side> sides = {
      {{h.x(), -h.y(), -h.z()}, {0, 2 * h.y(), 0}, {0, 0, 2 * h.z()}},    // +x
      {{-h.x(), -h.y(), -h.z()}, {0, 0, 2 * h.z()}, {0, 2 * h.y(), 0}},   // -x
      {{-h.x(), h.y(), -h.z()}, {0, 0, 2 * h.z()}, {2 * h.x(), 0, 0}},    // +y
      {{-h.x(), -h.y(), -h.z()}, {2 * h.x(), 0, 0}, {0, 0, 2 * h.z()}},   // -y
      {{-h.x(), -h.y(), h.z()}, {2 * h.x(), 0, 0}, {0, 2 * h.y(), 0}},    // +z
      {{-h.x(), -h.y(), -h.z()}, {0, 2 * h.y(), 0}, {2 * h.x(), 0, 0}},   // -z
  };
  for (const auto& side : sides) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Eigen::Vector3d p00 = side.origin + side.du * (double(i) / n) + side.dv * (double(j) / n);
        Eigen::Vector3d p10 = side.origin + side.du * (double(i + 1) / n) + side.dv * (double(j) / n);
        Eigen::Vector3d p01 = side.origin + side.du * (double(i) / n) + side.dv * (double(j + 1) / n);
        Eigen::Vector3d p11 =
            side.origin + side.du * (double(i + 1) / n) + side.dv * (double(j + 1) / n);
        int a = vertex(p00), b = vertex(p10), c = vertex(p11), d = vertex(p01);
        m.faces.emplace_back(a, b, c);
        m.faces.emplace_back(a, c, d);
      }
    }
  }
  return m;
}

TriangleMesh planeGrid(int nx, int ny, double width, double height) {
  TriangleMesh m;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.positions.emplace_back(width * i / nx, height * j / ny, 0.0);
  auto idx = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.faces.emplace_back(idx(i, j), idx(i + 1, j), idx(i + 1, j + 1));
      m.faces.emplace_back(idx(i, j), idx(i + 1, j + 1), idx(i, j + 1));
    }
  }
  return m;
}

TriangleMesh cylinder(int radialSegments, int heightSegments, double radius, double height,
                      bool capped) {
  TriangleMesh m;
  for (int s = 0; s <= heightSegments; ++s) {
    double z = height * (double(s) / heightSegments - 0.5);
    for (int l = 0; l < radialSegments; ++l) {
      double phi = 2.0 * kPi * l / radialSegments;
      m.positions.emplace_back(radius * std::cos(phi), radius * std::sin(phi), z);
    }
  }
  auto idx = [&](int s, int l) { return s * radialSegments + (l % radialSegments); };
  for (int s = 0; s < heightSegments; ++s) {
    for (int l = 0; l < radialSegments; ++l) {
      int a = idx(s, l), b = idx(s, l + 1), c = idx(s + 1, l), d = idx(s + 1, l + 1);
      m.faces.emplace_back(a, b, d);
      m.faces.emplace_back(a, d, c);
    }
  }
  if (capped) {
    int bottomCenter = static_cast<int>(m.positions.size());
    m.positions.emplace_back(0, 0, -height / 2);
    int topCenter = static_cast<int>(m.positions.size());
    m.positions.emplace_back(0, 0, height / 2);
    for (int l = 0; l < radialSegments; ++l) {
      m.faces.emplace_back(bottomCenter, idx(0, l + 1), idx(0, l));
      m.faces.emplace_back(topCenter, idx(heightSegments, l), idx(heightSegments, l + 1));
    }
  }
  return m;
}

namespace {

// Smooth direction-dependent bump field built from a few random plane waves;
// total amplitude is bounded by 0.2 so the blob stays star-shaped.
struct BlobField {
  static constexpr int kWaves = 5;
  Eigen::Vector3d axis[kWaves];
  double freq[kWaves];
  double phase[kWaves];
  double amp[kWaves];

  explicit BlobField(std::uint64_t seed) {
    CounterRng rng(seed);
    double total = 0;
    for (int k = 0; k < kWaves; ++k) {
      double z = 2.0 * rng.uniform(4 * k) - 1.0;
      double phi = 2.0 * kPi * rng.uniform(4 * k + 1);
      double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      axis[k] = Eigen::Vector3d(s * std::cos(phi), s * std::sin(phi), z);
      freq[k] = 2.0 + 4.0 * rng.uniform(4 * k + 2);
      phase[k] = 2.0 * kPi * rng.uniform(4 * k + 3);
      amp[k] = 0.5 + rng.uniform(4 * k + 7);
      total += amp[k];
    }
    for (int k = 0; k < kWaves; ++k) amp[k] *= 0.2 / total;
  }

  double eval(const Eigen::Vector3d& dir) const {
    double f = 0;
    for (int k = 0; k < kWaves; ++k) f += amp[k] * std::sin(freq[k] * dir.dot(axis[k]) + phase[k]);
    return f;
  }
};

}  // namespace

double starBlobRadius(std::uint64_t seed, const Eigen::Vector3d& direction, double baseRadius) {
  BlobField field(seed);
  return baseRadius * (1.0 + field.eval(direction.normalized()));
}

TriangleMesh starBlob(std::uint64_t seed, int stacks, int slices, double baseRadius,
                      const Eigen::Vector3d& center) {
  BlobField field(seed);
  TriangleMesh m = uvSphere(stacks, slices, 1.0, Eigen::Vector3d::Zero());
  for (auto& p : m.positions) {
    Eigen::Vector3d dir = p.normalized();
    p = center + dir * baseRadius * (1.0 + field.eval(dir));
  }
  return m;
}

bool starBlobContains(std::uint64_t seed, const Eigen::Vector3d& point, double baseRadius,
                      const Eigen::Vector3d& center) {
  Eigen::Vector3d d = point - center;
  double r = d.norm();
  if (r == 0) return true;
  return r < starBlobRadius(seed, d / r, baseRadius);
}

void removeFaces(TriangleMesh& mesh, const std::vector<int>& faces) {
  std::vector<std::uint8_t> keep(mesh.faces.size(), 1);
  for (int f : faces) keep[f] = 0;
  std::vector<Eigen::Vector3i> out;
  std::vector<Eigen::Vector3i> outUvs;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!keep[f]) continue;
    out.push_back(mesh.faces[f]);
    if (mesh.hasUvs()) outUvs.push_back(mesh.faceUvs[f]);
  }
  mesh.faces = std::move(out);
  if (mesh.hasUvs()) mesh.faceUvs = std::move(outUvs);
}

void flipFaces(TriangleMesh& mesh, const std::vector<int>& faces) {
  for (int f : faces) {
    std::swap(mesh.faces[f][1], mesh.faces[f][2]);
    if (mesh.hasUvs()) std::swap(mesh.faceUvs[f][1], mesh.faceUvs[f][2]);
  }
}

void flipRandomFaces(TriangleMesh& mesh, double fraction, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<int> flips;
  for (int f = 0; f < mesh.faceCount(); ++f)
    if (rng.uniform(f) < fraction) flips.push_back(f);
  flipFaces(mesh, flips);
}

void transformMesh(TriangleMesh& mesh, double scale, const Eigen::Vector3d& translate) {
  for (auto& p : mesh.positions) p = p * scale + translate;
}

TriangleMesh concatMeshes(const TriangleMesh& a, const TriangleMesh& b) {
  TriangleMesh m = a;
  int vertexOffset = a.vertexCount();
  m.positions.insert(m.positions.end(), b.positions.begin(), b.positions.end());
  for (const auto& f : b.faces)
    m.faces.emplace_back(f[0] + vertexOffset, f[1] + vertexOffset, f[2] + vertexOffset);
  // Normals and UVs survive only if both inputs carry them.
  if (a.hasNormals() && b.hasNormals())
    m.normals.insert(m.normals.end(), b.normals.begin(), b.normals.end());
  else
    m.normals.clear();
  if (a.hasUvs() && b.hasUvs()) {
    int uvOffset = static_cast<int>(a.uvs.size());
    m.uvs.insert(m.uvs.end(), b.uvs.begin(), b.uvs.end());
    for (const auto& f : b.faceUvs)
      m.faceUvs.emplace_back(f[0] + uvOffset, f[1] + uvOffset, f[2] + uvOffset);
  } else {
    m.uvs.clear();
    m.faceUvs.clear();
  }
  return m;
}

double sphereSdf(const Eigen::Vector3d& p, const Eigen::Vector3d& center, double radius) {
  return (p - center).norm() - radius;
}

double boxSdf(const Eigen::Vector3d& p, const Eigen::Vector3d& halfExtents) {
  Eigen::Vector3d q = p.cwiseAbs() - halfExtents;
  double outside = q.cwiseMax(Eigen::Vector3d::Zero()).norm();
  double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double torusSdf(const Eigen::Vector3d& p, double majorRadius, double minorRadius) {
  double ring = std::hypot(p.x(), p.y()) - majorRadius;
  return std::hypot(ring, p.z()) - minorRadius;
}

std::vector<Eigen::Vector3d> randomPointsInBox(int n, const Aabb3d& box, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Eigen::Vector3d> points(n);
  Eigen::Vector3d extent = box.extent();
  for (int i = 0; i < n; ++i) {
    points[i] = box.min + Eigen::Vector3d(rng.uniform(3 * i) * extent.x(),
                                          rng.uniform(3 * i + 1) * extent.y(),
                                          rng.uniform(3 * i + 2) * extent.z());
  }
  return points;
}

std::vector<Eigen::Vector3d> randomUnitVectors(int n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Eigen::Vector3d> dirs(n);
  for (int i = 0; i < n; ++i) {
    double z = 2.0 * rng.uniform(2 * i) - 1.0;
    double phi = 2.0 * kPi * rng.uniform(2 * i + 1);
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    dirs[i] = Eigen::Vector3d(s * std::cos(phi), s * std::sin(phi), z);
  }
  return dirs;
}

}  // namespace meshforge::fixtures
