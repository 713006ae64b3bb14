#include "meshforge/spatial/bvh.h"

#include <algorithm>
#include <queue>

#include "meshforge/core/error.h"
#include "meshforge/spatial/tri_geom.h"

namespace meshforge {

namespace {

constexpr int kLeafSize = 4;
constexpr int kMaxDepth = 64;

// Accept a candidate hit only if it beats the incumbent on (t, face).
inline bool improves(double t, int face, const RayHit& best) {
  return t < best.t || (t == best.t && face < best.face);
}

inline bool improves(double distSq, int face, const SurfacePoint& best) {
  return distSq < best.distanceSquared || (distSq == best.distanceSquared && face < best.face);
}

inline void testFace(const TriangleMesh& mesh, int face, const Eigen::Vector3d& origin,
                     const Eigen::Vector3d& dir, double tMin, double tMax, RayHit& best) {
  const auto& f = mesh.faces[face];
  double t, u, v;
  if (rayTriangle<double>(origin, dir, mesh.positions[f[0]], mesh.positions[f[1]],
                          mesh.positions[f[2]], t, u, v) &&
      t >= tMin && t <= tMax && improves(t, face, best)) {
    best = {face, t, u, v};
  }
}

inline void testFaceClosest(const TriangleMesh& mesh, int face, const Eigen::Vector3d& query,
                            SurfacePoint& best) {
  const auto& f = mesh.faces[face];
  Eigen::Vector3d bary;
  Eigen::Vector3d point = closestPointTriangle<double>(
      query, mesh.positions[f[0]], mesh.positions[f[1]], mesh.positions[f[2]], &bary);
  double distSq = (point - query).squaredNorm();
  if (improves(distSq, face, best)) best = {face, distSq, point, bary};
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
  validateMesh(mesh);
  int n = mesh.faceCount();
  faceOrder_.resize(n);
  std::vector<Eigen::Vector3d> centroids(n);
  for (int f = 0; f < n; ++f) {
    faceOrder_[f] = f;
    const auto& tri = mesh.faces[f];
    centroids[f] =
        (mesh.positions[tri[0]] + mesh.positions[tri[1]] + mesh.positions[tri[2]]) / 3.0;
  }
  nodes_.reserve(static_cast<std::size_t>(2 * n / kLeafSize + 2));
  build(faceOrder_, centroids, 0, n, 0);
}

int Bvh::build(std::vector<std::int32_t>& faces, std::vector<Eigen::Vector3d>& centroids,
               int begin, int end, int depth) {
  int nodeIndex = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb3d box;
  Aabb3d centroidBox;
  for (int i = begin; i < end; ++i) {
    const auto& tri = mesh_->faces[faces[i]];
    for (int k = 0; k < 3; ++k) box.extend(mesh_->positions[tri[k]]);
    centroidBox.extend(centroids[faces[i]]);
  }
  nodes_[nodeIndex].box = box;

  int count = end - begin;
  if (count <= kLeafSize || depth >= kMaxDepth) {
    nodes_[nodeIndex].first = begin;
    nodes_[nodeIndex].count = count;
    return nodeIndex;
  }

  // Median split on the widest axis of the centroid bounds. The comparator is
  // total (value, face index) so the tree is unique for a given mesh.
  int axis = centroidBox.longestAxis();
  int mid = begin + count / 2;
  std::nth_element(faces.begin() + begin, faces.begin() + mid, faces.begin() + end,
                   [&](std::int32_t a, std::int32_t b) {
                     double ca = centroids[a][axis], cb = centroids[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  int left = build(faces, centroids, begin, mid, depth + 1);
  int right = build(faces, centroids, mid, end, depth + 1);
  nodes_[nodeIndex].left = left;
  nodes_[nodeIndex].right = right;
  return nodeIndex;
}

RayHit Bvh::raycastFirst(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, double tMin,
                         double tMax) const {
  RayHit best;
  Eigen::Vector3d invDir;
  for (int k = 0; k < 3; ++k) invDir[k] = 1.0 / dir[k];  // IEEE inf on zero components

  int stack[kMaxDepth + 2];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double tNear;
    double limit = std::min(tMax, best.t);
    // Equal-t hits in farther nodes may still win on face index, so only
    // prune strictly beyond the incumbent.
    if (!node.box.intersectRay(origin, invDir, tMin, limit, tNear)) continue;
    if (node.leaf()) {
      for (int i = 0; i < node.count; ++i)
        testFace(*mesh_, faceOrder_[node.first + i], origin, dir, tMin, tMax, best);
      continue;
    }
    double tLeft, tRight;
    bool hitLeft = nodes_[node.left].box.intersectRay(origin, invDir, tMin, limit, tLeft);
    bool hitRight = nodes_[node.right].box.intersectRay(origin, invDir, tMin, limit, tRight);
    if (hitLeft && hitRight) {
      // Visit the nearer child first; push the farther one.
      if (tLeft <= tRight) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    } else if (hitLeft) {
      stack[top++] = node.left;
    } else if (hitRight) {
      stack[top++] = node.right;
    }
  }
  return best;
}

void Bvh::considerLeaf(const Node& node, const Eigen::Vector3d& query, SurfacePoint& best) const {
  for (int i = 0; i < node.count; ++i)
    testFaceClosest(*mesh_, faceOrder_[node.first + i], query, best);
}

SurfacePoint Bvh::closestPoint(const Eigen::Vector3d& query) const {
  return closestPointWithin(query, std::numeric_limits<double>::infinity());
}

SurfacePoint Bvh::closestPointWithin(const Eigen::Vector3d& query, double maxDistance) const {
  SurfacePoint best;
  best.distanceSquared =
      std::isinf(maxDistance) ? maxDistance : maxDistance * maxDistance;

  // Best-first: pop nodes by (box distance, node index). A node whose box is
  // strictly farther than the incumbent cannot improve it; equal distance can
  // still win the face-index tie, so the pop condition is strict.
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  heap.emplace(nodes_[0].box.squaredDistance(query), 0);
  while (!heap.empty()) {
    auto [boxDistSq, index] = heap.top();
    heap.pop();
    if (boxDistSq > best.distanceSquared) break;
    const Node& node = nodes_[index];
    if (node.leaf()) {
      considerLeaf(node, query, best);
      continue;
    }
    heap.emplace(nodes_[node.left].box.squaredDistance(query), node.left);
    heap.emplace(nodes_[node.right].box.squaredDistance(query), node.right);
  }
  if (!best.valid()) best.distanceSquared = std::numeric_limits<double>::infinity();
  return best;
}

RayHit raycastFirstBrute(const TriangleMesh& mesh, const Eigen::Vector3d& origin,
                         const Eigen::Vector3d& dir, double tMin, double tMax) {
  RayHit best;
  for (int f = 0; f < mesh.faceCount(); ++f) testFace(mesh, f, origin, dir, tMin, tMax, best);
  return best;
}

SurfacePoint closestPointBrute(const TriangleMesh& mesh, const Eigen::Vector3d& query) {
  SurfacePoint best;
  for (int f = 0; f < mesh.faceCount(); ++f) testFaceClosest(mesh, f, query, best);
  return best;
}

}  // namespace meshforge
