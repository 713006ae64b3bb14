#include "meshforge/simplify/simplify.h"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "meshforge/core/error.h"
#include "meshforge/core/parallel.h"

namespace meshforge {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kMinAreaVectorNorm = 2e-12;  // area 1e-12

Quadric facePlaneQuadric(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                         const Eigen::Vector3d& p2) {
  Eigen::Vector3d av = 0.5 * (p1 - p0).cross(p2 - p0);
  double area = av.norm();
  if (area < 1e-20) return {};
  Eigen::Vector3d n = av / area;
  return Quadric::fromPlane(n, -n.dot(p0), area);
}

// Plane through the edge (pa, pb), perpendicular to the face owning it.
void addEdgeConstraint(const Eigen::Vector3d& pa, const Eigen::Vector3d& pb,
                       const Eigen::Vector3d& faceAreaVec, Quadric& qa, Quadric& qb) {
  Eigen::Vector3d e = pb - pa;
  Eigen::Vector3d m = e.cross(faceAreaVec);
  double len = m.norm();
  if (len < 1e-20) return;
  m /= len;
  Quadric q = Quadric::fromPlane(m, -m.dot(pa), e.squaredNorm());
  qa += q;
  qb += q;
}

// Per-round connectivity snapshot over the live faces.
struct RoundTopo {
  std::vector<int> offsets;  // CSR vertex -> incident live faces
  std::vector<int> incident;
  struct Edge {
    int a, b;         // a < b
    int firstEntry;   // run of incident faces in entryFaces
    int entryCount;
  };
  std::vector<Edge> edges;
  std::vector<int> entryFaces;
  std::vector<std::uint8_t> vertexBoundary;
};

RoundTopo buildTopo(const std::vector<Eigen::Vector3i>& faces,
                    const std::vector<std::uint8_t>& alive, int nv) {
  RoundTopo topo;
  topo.offsets.assign(nv + 1, 0);
  struct Entry {
    std::uint64_t key;
    int face;
  };
  std::vector<Entry> entries;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (!alive[f]) continue;
    for (int k = 0; k < 3; ++k) {
      topo.offsets[faces[f][k] + 1]++;
      entries.push_back({edgeKey(faces[f][k], faces[f][(k + 1) % 3]), static_cast<int>(f)});
    }
  }
  for (int v = 0; v < nv; ++v) topo.offsets[v + 1] += topo.offsets[v];
  topo.incident.resize(entries.size());
  std::vector<int> cursor(topo.offsets.begin(), topo.offsets.end() - 1);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (!alive[f]) continue;
    for (int k = 0; k < 3; ++k) topo.incident[cursor[faces[f][k]]++] = static_cast<int>(f);
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& l, const Entry& r) {
    return l.key != r.key ? l.key < r.key : l.face < r.face;
  });
  topo.entryFaces.resize(entries.size());
  topo.vertexBoundary.assign(nv, 0);
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    RoundTopo::Edge e;
    e.a = static_cast<int>(entries[i].key >> 32);
    e.b = static_cast<int>(entries[i].key & 0xffffffffu);
    e.firstEntry = static_cast<int>(i);
    e.entryCount = static_cast<int>(j - i);
    topo.edges.push_back(e);
    if (e.entryCount != 2) {
      topo.vertexBoundary[e.a] = 1;
      topo.vertexBoundary[e.b] = 1;
    }
    i = j;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) topo.entryFaces[i] = entries[i].face;
  return topo;
}

}  // namespace

std::vector<Quadric> initQuadrics(const TriangleMesh& mesh) {
  std::vector<Quadric> quadrics(mesh.positions.size());
  for (int f = 0; f < mesh.faceCount(); ++f) {
    const auto& t = mesh.faces[f];
    Quadric fq = facePlaneQuadric(mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]]);
    for (int k = 0; k < 3; ++k) quadrics[t[k]] += fq;
  }
  return quadrics;
}

void addBoundaryConstraints(const TriangleMesh& mesh, std::vector<Quadric>& quadrics) {
  std::vector<std::uint8_t> alive(mesh.faces.size(), 1);
  RoundTopo topo = buildTopo(mesh.faces, alive, mesh.vertexCount());
  for (const auto& e : topo.edges) {
    if (e.entryCount == 2) continue;
    for (int i = 0; i < e.entryCount; ++i) {
      int f = topo.entryFaces[e.firstEntry + i];
      addEdgeConstraint(mesh.positions[e.a], mesh.positions[e.b], faceAreaVector(mesh, f),
                        quadrics[e.a], quadrics[e.b]);
    }
  }
}

CollapseCandidate placeContraction(const Quadric& q0, const Quadric& q1,
                                   const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                                   bool v0Boundary, bool v1Boundary, Placement placement,
                                   bool lockBoundary) {
  CollapseCandidate out;
  Quadric q = q0 + q1;

  if (v0Boundary || v1Boundary) {
    if (lockBoundary) {
      if (v0Boundary && v1Boundary) {
        out.feasible = false;
        out.cost = std::numeric_limits<double>::infinity();
        return out;
      }
      out.target = v0Boundary ? v0 : v1;
      out.kind = PlacementKind::BoundaryFixed;
    } else {
      out.target = q.evaluate(v0) <= q.evaluate(v1) ? v0 : v1;
      out.kind = PlacementKind::Endpoint;
    }
    out.cost = std::max(0.0, q.evaluate(out.target));
    return out;
  }

  Eigen::Vector3d e = v1 - v0;
  if (placement == Placement::Optimal) {
    Eigen::LDLT<Eigen::Matrix3d> ldlt(q.A);
    Eigen::Vector3d d = ldlt.vectorD();
    double dmin = d.minCoeff();
    double eAe = e.dot(q.A * e);
    bool singular = ldlt.info() != Eigen::Success || !(dmin > 0.0) ||
                    d.maxCoeff() / dmin > kConditionLimit || !(eAe > 0.0);
    if (!singular) {
      Eigen::Vector3d vopt = ldlt.solve(-q.b);
      double t = e.dot(q.A * (vopt - v0)) / eAe;
      double tc = std::clamp(t, 0.0, 1.0);
      out.target = v0 + tc * e;
      out.kind = (tc > 0.0 && tc < 1.0) ? PlacementKind::OptimalInterior
                                        : PlacementKind::ClampedEdge;
      out.cost = std::max(0.0, q.evaluate(out.target));
      return out;
    }
  }
  out.target = v0 + 0.5 * e;
  out.kind = PlacementKind::Midpoint;
  out.cost = std::max(0.0, q.evaluate(out.target));
  return out;
}

SimplifyResult simplifyMesh(const TriangleMesh& input, const SimplifyOptions& options) {
  validateMesh(input);
  if (options.targetFaces < 4)
    throw Error(ErrorCode::InvalidConfig, "simplify: targetFaces must be at least 4");

  SimplifyResult res;
  std::int64_t live = input.faceCount();
  if (live <= options.targetFaces) {
    res.mesh = input;
    return res;
  }

  const int nv = input.vertexCount();
  std::vector<Eigen::Vector3d> pos = input.positions;
  std::vector<Eigen::Vector3i> faces = input.faces;
  std::vector<std::uint8_t> alive(faces.size(), 1);
  std::vector<Quadric> quadrics = initQuadrics(input);

  // Scratch reused across rounds.
  std::vector<int> ringStamp(nv, -1), neighborStamp(nv, -1), dedupStamp(nv, -1);
  std::vector<int> ring, opp;
  std::vector<std::uint64_t> aOnlyEdges;
  std::vector<std::uint8_t> touched(nv);

  while (live > options.targetFaces) {
    RoundTopo topo = buildTopo(faces, alive, nv);

    // Boundary vertices do not accumulate across rounds: re-derive from the
    // current faces, then add the rim constraints.
    for (int v = 0; v < nv; ++v) {
      if (!topo.vertexBoundary[v]) continue;
      Quadric fresh;
      for (int i = topo.offsets[v]; i < topo.offsets[v + 1]; ++i) {
        const auto& t = faces[topo.incident[i]];
        fresh += facePlaneQuadric(pos[t[0]], pos[t[1]], pos[t[2]]);
      }
      quadrics[v] = fresh;
    }
    for (const auto& e : topo.edges) {
      if (e.entryCount == 2) continue;
      for (int i = 0; i < e.entryCount; ++i) {
        const auto& t = faces[topo.entryFaces[e.firstEntry + i]];
        Eigen::Vector3d av = 0.5 * (pos[t[1]] - pos[t[0]]).cross(pos[t[2]] - pos[t[0]]);
        addEdgeConstraint(pos[e.a], pos[e.b], av, quadrics[e.a], quadrics[e.b]);
      }
    }

    std::vector<CollapseCandidate> cands(topo.edges.size());
    parallelFor(0, static_cast<std::int64_t>(topo.edges.size()), [&](std::int64_t i) {
      const auto& e = topo.edges[i];
      CollapseCandidate c =
          placeContraction(quadrics[e.a], quadrics[e.b], pos[e.a], pos[e.b],
                           topo.vertexBoundary[e.a] != 0, topo.vertexBoundary[e.b] != 0,
                           options.placement, options.lockBoundary);
      c.v0 = e.a;
      c.v1 = e.b;
      cands[i] = c;
    });

    std::vector<int> order;
    order.reserve(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (cands[i].feasible) order.push_back(static_cast<int>(i));
    std::sort(order.begin(), order.end(), [&](int l, int r) {
      const auto& cl = cands[l];
      const auto& cr = cands[r];
      if (cl.cost != cr.cost) return cl.cost < cr.cost;
      if (cl.v0 != cr.v0) return cl.v0 < cr.v0;
      return cl.v1 < cr.v1;
    });

    std::fill(touched.begin(), touched.end(), 0);
    std::vector<int> accepted;
    int epoch = 0;

    for (int idx : order) {
      if (live <= options.targetFaces) break;
      const auto& cand = cands[idx];
      int a = cand.v0, b = cand.v1;
      if (touched[a] || touched[b]) continue;
      ++epoch;

      ring.clear();
      auto addRing = [&](int v) {
        if (ringStamp[v] != epoch) {
          ringStamp[v] = epoch;
          ring.push_back(v);
        }
      };
      addRing(a);
      addRing(b);
      for (int side = 0; side < 2; ++side) {
        int v = side == 0 ? a : b;
        for (int i = topo.offsets[v]; i < topo.offsets[v + 1]; ++i)
          for (int k = 0; k < 3; ++k) addRing(faces[topo.incident[i]][k]);
      }
      bool blocked = false;
      for (int v : ring) blocked = blocked || touched[v] != 0;
      if (blocked) continue;

      // Link condition: common neighbors must be exactly the vertices
      // opposite the shared faces, otherwise the collapse pinches the surface.
      int sharedFaceCount = 0;
      opp.clear();
      for (int i = topo.offsets[a]; i < topo.offsets[a + 1]; ++i) {
        const auto& t = faces[topo.incident[i]];
        if (t[0] == b || t[1] == b || t[2] == b) {
          ++sharedFaceCount;
          for (int k = 0; k < 3; ++k)
            if (t[k] != a && t[k] != b) opp.push_back(t[k]);
        }
      }
      std::sort(opp.begin(), opp.end());
      opp.erase(std::unique(opp.begin(), opp.end()), opp.end());
      for (int i = topo.offsets[a]; i < topo.offsets[a + 1]; ++i)
        for (int k = 0; k < 3; ++k) {
          int v = faces[topo.incident[i]][k];
          if (v != a && v != b) neighborStamp[v] = epoch;
        }
      int commonCount = 0;
      for (int i = topo.offsets[b]; i < topo.offsets[b + 1]; ++i)
        for (int k = 0; k < 3; ++k) {
          int v = faces[topo.incident[i]][k];
          if (v == a || v == b || dedupStamp[v] == epoch) continue;
          dedupStamp[v] = epoch;
          if (neighborStamp[v] == epoch) ++commonCount;
        }
      if (commonCount != static_cast<int>(opp.size())) continue;

      // Merging must not produce two copies of one face: compare the opposite
      // edges of the a-only and b-only fans.
      aOnlyEdges.clear();
      bool veto = false;
      for (int side = 0; side < 2 && !veto; ++side) {
        int self = side == 0 ? a : b;
        int other = side == 0 ? b : a;
        for (int i = topo.offsets[self]; i < topo.offsets[self + 1] && !veto; ++i) {
          const auto& t = faces[topo.incident[i]];
          if (t[0] == other || t[1] == other || t[2] == other) continue;
          int u = -1, w = -1;
          for (int k = 0; k < 3; ++k)
            if (t[k] != self) (u < 0 ? u : w) = t[k];
          std::uint64_t key = edgeKey(u, w);
          if (side == 0) {
            aOnlyEdges.push_back(key);
          } else if (std::binary_search(aOnlyEdges.begin(), aOnlyEdges.end(), key)) {
            veto = true;
          }
        }
        if (side == 0) std::sort(aOnlyEdges.begin(), aOnlyEdges.end());
      }
      if (veto) continue;

      // Geometric vetoes on every surviving face of the two fans: no normal
      // may rotate past 90 degrees and no face may degenerate.
      for (int side = 0; side < 2 && !veto; ++side) {
        int self = side == 0 ? a : b;
        int other = side == 0 ? b : a;
        for (int i = topo.offsets[self]; i < topo.offsets[self + 1] && !veto; ++i) {
          const auto& t = faces[topo.incident[i]];
          if (t[0] == other || t[1] == other || t[2] == other) continue;
          Eigen::Vector3d p[3], q[3];
          for (int k = 0; k < 3; ++k) {
            p[k] = pos[t[k]];
            q[k] = t[k] == self ? cand.target : pos[t[k]];
          }
          Eigen::Vector3d oldAv = (p[1] - p[0]).cross(p[2] - p[0]);
          Eigen::Vector3d newAv = (q[1] - q[0]).cross(q[2] - q[0]);
          if (newAv.norm() < kMinAreaVectorNorm || oldAv.dot(newAv) < 0.0) veto = true;
        }
      }
      if (veto) continue;

      for (int v : ring) touched[v] = 1;
      accepted.push_back(idx);
      live -= sharedFaceCount;
    }

    if (accepted.empty()) break;

    // Accepted rings are pairwise disjoint, so the applications commute.
    parallelFor(0, static_cast<std::int64_t>(accepted.size()), [&](std::int64_t i) {
      const auto& cand = cands[accepted[i]];
      int s = cand.v0, d = cand.v1;  // v0 < v1 by construction
      pos[s] = cand.target;
      quadrics[s] += quadrics[d];
      for (int j = topo.offsets[d]; j < topo.offsets[d + 1]; ++j) {
        int f = topo.incident[j];
        auto& t = faces[f];
        if (t[0] == s || t[1] == s || t[2] == s) {
          alive[f] = 0;
        } else {
          for (int k = 0; k < 3; ++k)
            if (t[k] == d) t[k] = s;
        }
      }
    });
    for (int idx : accepted) res.kindCounts[static_cast<int>(cands[idx].kind)]++;
    res.collapses += static_cast<std::int64_t>(accepted.size());
    res.rounds++;
  }

  res.reachedTarget = live <= options.targetFaces;
  TriangleMesh scratch;
  scratch.positions = std::move(pos);
  scratch.faces = std::move(faces);
  res.mesh = extractFaces(scratch, alive);
  return res;
}

}  // namespace meshforge
