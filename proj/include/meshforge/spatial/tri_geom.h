#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>

namespace meshforge {

// Moller-Trumbore ray/triangle intersection. Accepts hits on edges and
// vertices (closed barycentric range) so rays crossing shared edges of a
// closed mesh register on at least one incident face; callers break the
// resulting ties by face index. Rejects near-parallel rays by determinant.
// t is in units of |dir| and may be negative; the caller filters the range.
template <typename S>
bool rayTriangle(const Eigen::Matrix<S, 3, 1>& orig, const Eigen::Matrix<S, 3, 1>& dir,
                 const Eigen::Matrix<S, 3, 1>& a, const Eigen::Matrix<S, 3, 1>& b,
                 const Eigen::Matrix<S, 3, 1>& c, S& t, S& u, S& v) {
  const S detEps = S(1e-9);
  Eigen::Matrix<S, 3, 1> e1 = b - a;
  Eigen::Matrix<S, 3, 1> e2 = c - a;
  Eigen::Matrix<S, 3, 1> pvec = dir.cross(e2);
  S det = e1.dot(pvec);
  if (std::abs(det) < detEps) return false;
  S invDet = S(1) / det;
  Eigen::Matrix<S, 3, 1> svec = orig - a;
  u = svec.dot(pvec) * invDet;
  if (u < S(0) || u > S(1)) return false;
  Eigen::Matrix<S, 3, 1> qvec = svec.cross(e1);
  v = dir.dot(qvec) * invDet;
  if (v < S(0) || u + v > S(1)) return false;
  t = e2.dot(qvec) * invDet;
  return true;
}

// Closest point on triangle abc to p (Voronoi-region case analysis).
// Optionally reports barycentric weights (wa, wb, wc) of the closest point.
template <typename S>
Eigen::Matrix<S, 3, 1> closestPointTriangle(const Eigen::Matrix<S, 3, 1>& p,
                                            const Eigen::Matrix<S, 3, 1>& a,
                                            const Eigen::Matrix<S, 3, 1>& b,
                                            const Eigen::Matrix<S, 3, 1>& c,
                                            Eigen::Matrix<S, 3, 1>* bary = nullptr) {
  using V = Eigen::Matrix<S, 3, 1>;
  auto report = [&](S wa, S wb, S wc) {
    if (bary) *bary = V(wa, wb, wc);
  };

  V ab = b - a, ac = c - a, ap = p - a;
  S d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= S(0) && d2 <= S(0)) {
    report(S(1), S(0), S(0));
    return a;
  }

  V bp = p - b;
  S d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= S(0) && d4 <= d3) {
    report(S(0), S(1), S(0));
    return b;
  }

  S vc = d1 * d4 - d3 * d2;
  if (vc <= S(0) && d1 >= S(0) && d3 <= S(0)) {
    S w = d1 / (d1 - d3);
    report(S(1) - w, w, S(0));
    return a + w * ab;
  }

  V cp = p - c;
  S d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= S(0) && d5 <= d6) {
    report(S(0), S(0), S(1));
    return c;
  }

  S vb = d5 * d2 - d1 * d6;
  if (vb <= S(0) && d2 >= S(0) && d6 <= S(0)) {
    S w = d2 / (d2 - d6);
    report(S(1) - w, S(0), w);
    return a + w * ac;
  }

  S va = d3 * d6 - d5 * d4;
  if (va <= S(0) && (d4 - d3) >= S(0) && (d5 - d6) >= S(0)) {
    S w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    report(S(0), S(1) - w, w);
    return b + w * (c - b);
  }

  S denom = S(1) / (va + vb + vc);
  S wb = vb * denom;
  S wc = vc * denom;
  report(S(1) - wb - wc, wb, wc);
  return a + ab * wb + ac * wc;
}

}  // namespace meshforge
