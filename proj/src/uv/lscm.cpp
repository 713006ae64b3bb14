#include "meshforge/uv/lscm.h"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "meshforge/core/error.h"

namespace meshforge {

namespace {

// Chart faces re-indexed against their own vertex set.
struct LocalPatch {
  std::vector<int> faces;                  // global face ids, ascending
  std::vector<Eigen::Vector3d> pos;        // local vertex positions
  std::vector<std::array<int, 3>> tris;    // local vertex ids per face
};

LocalPatch buildPatch(const TriangleMesh& mesh, std::vector<int> faces) {
  std::sort(faces.begin(), faces.end());
  LocalPatch patch;
  patch.faces = std::move(faces);
  std::unordered_map<int, int> remap;
  for (int f : patch.faces) {
    std::array<int, 3> tri;
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.faces[f][k];
      auto [it, inserted] = remap.try_emplace(v, static_cast<int>(patch.pos.size()));
      if (inserted) patch.pos.push_back(mesh.positions[v]);
      tri[k] = it->second;
    }
    patch.tris.push_back(tri);
  }
  return patch;
}

std::uint64_t edgeKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Disk test: edge-manifold, edge-connected, exactly one boundary loop,
// Euler characteristic 1. Fills `boundary` with the boundary vertex ids in
// ascending order when it succeeds.
bool isDisk(const LocalPatch& patch, std::vector<int>& boundary) {
  boundary.clear();
  struct EdgeUse {
    int count = 0;
    std::array<int, 2> face{-1, -1};
  };
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  for (int f = 0; f < static_cast<int>(patch.tris.size()); ++f) {
    for (int k = 0; k < 3; ++k) {
      EdgeUse& use = edges[edgeKey(patch.tris[f][k], patch.tris[f][(k + 1) % 3])];
      if (use.count < 2) use.face[use.count] = f;
      ++use.count;
    }
  }
  for (const auto& [key, use] : edges) {
    if (use.count > 2) return false;
  }

  // Edge connectivity.
  std::vector<std::uint8_t> seen(patch.tris.size(), 0);
  std::deque<int> frontier{0};
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int f = frontier.front();
    frontier.pop_front();
    for (int k = 0; k < 3; ++k) {
      const EdgeUse& use = edges.at(edgeKey(patch.tris[f][k], patch.tris[f][(k + 1) % 3]));
      if (use.count != 2) continue;
      const int g = use.face[0] == f ? use.face[1] : use.face[0];
      if (!seen[g]) {
        seen[g] = 1;
        ++reached;
        frontier.push_back(g);
      }
    }
  }
  if (reached != static_cast<int>(patch.tris.size())) return false;

  // Boundary edges listed in face order so everything downstream is
  // deterministic (the map's own iteration order is not).
  std::vector<std::array<int, 2>> boundaryEdges;
  std::vector<std::uint64_t> visitedKeys;
  {
    std::unordered_map<std::uint64_t, std::uint8_t> emitted;
    for (const auto& tri : patch.tris) {
      for (int k = 0; k < 3; ++k) {
        const int a = tri[k], b = tri[(k + 1) % 3];
        const std::uint64_t key = edgeKey(a, b);
        if (edges.at(key).count != 1) continue;
        if (!emitted.emplace(key, 1).second) continue;
        boundaryEdges.push_back({a, b});
      }
    }
  }
  if (boundaryEdges.empty()) return false;  // closed surface

  // Each boundary vertex must touch exactly two boundary edges.
  std::unordered_map<int, std::array<int, 2>> link;  // vertex -> boundary neighbors
  auto addLink = [&link](int v, int w) {
    auto [it, inserted] = link.try_emplace(v, std::array<int, 2>{-1, -1});
    if (it->second[0] == -1) {
      it->second[0] = w;
    } else if (it->second[1] == -1) {
      it->second[1] = w;
    } else {
      return false;  // three boundary edges meet here
    }
    return true;
  };
  for (const auto& [a, b] : boundaryEdges) {
    if (!addLink(a, b) || !addLink(b, a)) return false;
  }
  for (const auto& [v, nbrs] : link) {
    if (nbrs[1] == -1) return false;
  }

  // Walk one loop; it must consume every boundary vertex.
  const int start = boundaryEdges[0][0];
  int prev = start, cur = boundaryEdges[0][1];
  int walked = 1;
  while (cur != start) {
    const auto& nbrs = link.at(cur);
    const int next = nbrs[0] == prev ? nbrs[1] : nbrs[0];
    prev = cur;
    cur = next;
    if (++walked > static_cast<int>(link.size())) return false;
  }
  if (walked != static_cast<int>(link.size())) return false;

  const long long chi = static_cast<long long>(patch.pos.size()) -
                        static_cast<long long>(edges.size()) +
                        static_cast<long long>(patch.tris.size());
  if (chi != 1) return false;

  boundary.reserve(link.size());
  for (int v = 0; v < static_cast<int>(patch.pos.size()); ++v) {
    if (link.count(v)) boundary.push_back(v);
  }
  return true;
}

// Boundary vertex pair at maximum 3D distance; ties resolve to the earliest
// pair in (i, j) scan order.
std::pair<int, int> farthestPins(const LocalPatch& patch, const std::vector<int>& boundary) {
  int bestA = boundary[0], bestB = boundary[0];
  double bestD = -1.0;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    for (std::size_t j = i + 1; j < boundary.size(); ++j) {
      const double d = (patch.pos[boundary[i]] - patch.pos[boundary[j]]).squaredNorm();
      if (d > bestD) {
        bestD = d;
        bestA = boundary[i];
        bestB = boundary[j];
      }
    }
  }
  return {bestA, bestB};
}

bool solveLscm(const LocalPatch& patch, int pinA, int pinB, double pinDist,
               std::vector<Eigen::Vector2d>& uv) {
  const int nv = static_cast<int>(patch.pos.size());
  const int nf = static_cast<int>(patch.tris.size());

  std::vector<int> var(nv, -1);
  int nvar = 0;
  for (int v = 0; v < nv; ++v) {
    if (v != pinA && v != pinB) var[v] = nvar++;
  }
  const Eigen::Vector2d pinUv[2] = {Eigen::Vector2d(0, 0), Eigen::Vector2d(pinDist, 0)};
  auto pinnedUv = [&](int v) { return v == pinA ? pinUv[0] : pinUv[1]; };

  if (nvar == 0) {
    uv.assign(nv, Eigen::Vector2d::Zero());
    for (int v = 0; v < nv; ++v) uv[v] = pinnedUv(v);
    return true;
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nf) * 12);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * nf);

  for (int f = 0; f < nf; ++f) {
    const auto& tri = patch.tris[f];
    const Eigen::Vector3d& p0 = patch.pos[tri[0]];
    const Eigen::Vector3d e1 = patch.pos[tri[1]] - p0;
    const Eigen::Vector3d e2 = patch.pos[tri[2]] - p0;
    const Eigen::Vector3d n = e1.cross(e2);
    const double doubleArea = n.norm();
    if (doubleArea < 1e-20) continue;  // degenerate face constrains nothing

    // Local orthonormal frame in the triangle plane.
    const Eigen::Vector3d axisX = e1.normalized();
    const Eigen::Vector3d axisY = (n / doubleArea).cross(axisX);
    const double x1 = e1.norm();
    const double x2 = e2.dot(axisX);
    const double y2 = e2.dot(axisY);

    // Conformality as one complex equation, sum_k W_k (u_k + i v_k) = 0.
    const double wr[3] = {x2 - x1, -x2, x1};
    const double wi[3] = {y2, -y2, 0.0};
    const double scale = 1.0 / std::sqrt(doubleArea);

    for (int k = 0; k < 3; ++k) {
      const double a = wr[k] * scale;
      const double c = wi[k] * scale;
      const int v = tri[k];
      if (var[v] >= 0) {
        trips.emplace_back(2 * f, 2 * var[v], a);
        trips.emplace_back(2 * f, 2 * var[v] + 1, -c);
        trips.emplace_back(2 * f + 1, 2 * var[v], c);
        trips.emplace_back(2 * f + 1, 2 * var[v] + 1, a);
      } else {
        const Eigen::Vector2d p = pinnedUv(v);
        rhs[2 * f] -= a * p.x() - c * p.y();
        rhs[2 * f + 1] -= c * p.x() + a * p.y();
      }
    }
  }

  Eigen::SparseMatrix<double> A(2 * nf, 2 * nvar);
  A.setFromTriplets(trips.begin(), trips.end());
  const Eigen::SparseMatrix<double> AtA = A.transpose() * A;
  const Eigen::VectorXd Atb = A.transpose() * rhs;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(AtA);
  if (solver.info() != Eigen::Success) return false;
  const Eigen::VectorXd x = solver.solve(Atb);
  if (solver.info() != Eigen::Success || !x.allFinite()) return false;

  uv.assign(nv, Eigen::Vector2d::Zero());
  for (int v = 0; v < nv; ++v) {
    if (var[v] >= 0) {
      uv[v] = Eigen::Vector2d(x[2 * var[v]], x[2 * var[v] + 1]);
    } else {
      uv[v] = pinnedUv(v);
    }
  }
  return true;
}

double signedUvArea(const std::vector<Eigen::Vector2d>& uv, const std::array<int, 3>& tri) {
  const Eigen::Vector2d d1 = uv[tri[1]] - uv[tri[0]];
  const Eigen::Vector2d d2 = uv[tri[2]] - uv[tri[0]];
  return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
}

// Flatten one patch; false means the caller should bisect and retry.
bool flattenPatch(const LocalPatch& patch, std::vector<Eigen::Vector2d>& uv) {
  std::vector<int> boundary;
  if (!isDisk(patch, boundary)) return false;
  if (boundary.size() < 2) return false;

  const auto [pinA, pinB] = farthestPins(patch, boundary);
  const double pinDist = (patch.pos[pinA] - patch.pos[pinB]).norm();
  if (pinDist < 1e-20) return false;

  if (!solveLscm(patch, pinA, pinB, pinDist, uv)) return false;

  double positive = 0.0, negative = 0.0;
  double area3d = 0.0;
  for (std::size_t f = 0; f < patch.tris.size(); ++f) {
    const double sa = signedUvArea(uv, patch.tris[f]);
    if (sa > 0) positive += sa;
    if (sa < 0) negative -= sa;
    const auto& tri = patch.tris[f];
    area3d += 0.5 * (patch.pos[tri[1]] - patch.pos[tri[0]])
                        .cross(patch.pos[tri[2]] - patch.pos[tri[0]])
                        .norm();
  }
  if (positive <= 0.0 && negative <= 0.0) return false;  // collapsed map

  if (negative > 0.0 && positive > 0.0) return false;  // fold-over
  if (negative > 0.0) {
    // Uniform inversion is just the mirror image; flip it back.
    for (auto& p : uv) p.y() = -p.y();
    std::swap(positive, negative);
  }

  const double scale = std::sqrt(area3d / positive);
  Eigen::Vector2d lo = uv[0];
  for (auto& p : uv) {
    p *= scale;
    lo = lo.cwiseMin(p);
  }
  for (auto& p : uv) p -= lo;
  return true;
}

// Geometric bisection of a face set (widest centroid axis, area median).
std::pair<std::vector<int>, std::vector<int>> bisectFaces(const TriangleMesh& mesh,
                                                          std::vector<int> faces) {
  std::vector<Eigen::Vector3d> centroid(faces.size());
  std::vector<double> area(faces.size());
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::max());
  Eigen::Vector3d hi = -lo;
  double total = 0.0;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto& tri = mesh.faces[faces[i]];
    centroid[i] =
        (mesh.positions[tri[0]] + mesh.positions[tri[1]] + mesh.positions[tri[2]]) / 3.0;
    area[i] = faceArea(mesh, faces[i]);
    total += area[i];
    lo = lo.cwiseMin(centroid[i]);
    hi = hi.cwiseMax(centroid[i]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  std::vector<std::size_t> order(faces.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (centroid[a][axis] != centroid[b][axis]) return centroid[a][axis] < centroid[b][axis];
    return faces[a] < faces[b];
  });

  double running = 0.0;
  std::size_t cut = 0;
  for (; cut < order.size() - 1; ++cut) {
    running += area[order[cut]];
    if (running >= 0.5 * total) {
      ++cut;
      break;
    }
  }
  cut = std::max<std::size_t>(1, std::min(cut, order.size() - 1));

  std::vector<int> left, right;
  left.reserve(cut);
  right.reserve(order.size() - cut);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < cut ? left : right).push_back(faces[order[i]]);
  }
  return {std::move(left), std::move(right)};
}

}  // namespace

std::vector<Chart> parameterizeLscm(const TriangleMesh& mesh, const Chart& chart,
                                    const LscmOptions& options) {
  if (chart.faces.empty()) throw Error(ErrorCode::EmptyMesh, "chart has no faces");

  struct WorkItem {
    std::vector<int> faces;
    int depth;
  };
  std::deque<WorkItem> work;
  work.push_back({chart.faces, 0});

  std::vector<Chart> out;
  while (!work.empty()) {
    WorkItem item = std::move(work.front());
    work.pop_front();

    const LocalPatch patch = buildPatch(mesh, std::move(item.faces));
    std::vector<Eigen::Vector2d> uv;
    if (flattenPatch(patch, uv)) {
      Chart done;
      done.faces = patch.faces;
      done.cornerUvs.resize(patch.faces.size());
      for (std::size_t f = 0; f < patch.faces.size(); ++f) {
        for (int k = 0; k < 3; ++k) done.cornerUvs[f][k] = uv[patch.tris[f][k]];
      }
      out.push_back(std::move(done));
      continue;
    }

    if (patch.faces.size() < 2 || item.depth >= options.maxDepth) {
      throw Error(ErrorCode::ChartFailure, "chart could not be flattened within retry depth");
    }
    auto [left, right] = bisectFaces(mesh, patch.faces);
    work.push_front({std::move(right), item.depth + 1});
    work.push_front({std::move(left), item.depth + 1});
  }
  return out;
}

}  // namespace meshforge
