#pragma once

#include <Eigen/Core>
#include <limits>

namespace meshforge {

template <typename S>
struct Aabb3 {
  using Vec = Eigen::Matrix<S, 3, 1>;

  Vec min = Vec::Constant(std::numeric_limits<S>::infinity());
  Vec max = Vec::Constant(-std::numeric_limits<S>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }

  void extend(const Vec& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb3& other) {
    min = min.cwiseMin(other.min);
    max = max.cwiseMax(other.max);
  }

  Vec center() const { return (min + max) * S(0.5); }
  Vec extent() const { return max - min; }
  S diagonal() const { return extent().norm(); }

  int longestAxis() const {
    Vec e = extent();
    int axis = 0;
    e.maxCoeff(&axis);
    return axis;
  }

  // Squared distance from a point to the box (0 inside).
  S squaredDistance(const Vec& p) const {
    Vec d = (min - p).cwiseMax(p - max).cwiseMax(Vec::Zero());
    return d.squaredNorm();
  }

  // Slab test; returns entry parameter in tNear if the ray intersects
  // [tMin, tMax]. invDir may contain infinities for axis-parallel rays.
  bool intersectRay(const Vec& origin, const Vec& invDir, S tMin, S tMax, S& tNear) const {
    for (int a = 0; a < 3; ++a) {
      S t0 = (min[a] - origin[a]) * invDir[a];
      S t1 = (max[a] - origin[a]) * invDir[a];
      if (invDir[a] < S(0)) std::swap(t0, t1);
      tMin = t0 > tMin ? t0 : tMin;
      tMax = t1 < tMax ? t1 : tMax;
      if (tMax < tMin) return false;
    }
    tNear = tMin;
    return true;
  }
};

using Aabb3d = Aabb3<double>;
using Aabb3f = Aabb3<float>;

}  // namespace meshforge
