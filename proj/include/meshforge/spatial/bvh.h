#pragma once

#include <limits>
#include <vector>

#include "meshforge/core/aabb.h"
#include "meshforge/core/mesh.h"

namespace meshforge {

struct RayHit {
  int face = -1;
  double t = std::numeric_limits<double>::infinity();
  double u = 0, v = 0;  // barycentric weights of the second and third corner
  bool valid() const { return face >= 0; }
};

struct SurfacePoint {
  int face = -1;
  double distanceSquared = std::numeric_limits<double>::infinity();
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d barycentric = Eigen::Vector3d::Zero();
  bool valid() const { return face >= 0; }
  double distance() const { return std::sqrt(distanceSquared); }
};

// Static median-split BVH over triangle faces. The mesh must outlive the
// tree. Queries are const and safe to issue concurrently; build is
// deterministic for a fixed input mesh.
class Bvh {
 public:
  struct Node {
    Aabb3d box;
    std::int32_t left = -1;   // child node indices, unused in leaves
    std::int32_t right = -1;
    std::int32_t first = 0;   // leaf: faces are faceOrder[first .. first+count)
    std::int32_t count = 0;   // > 0 marks a leaf
    bool leaf() const { return count > 0; }
  };

  explicit Bvh(const TriangleMesh& mesh);

  // Nearest intersection with tMin <= t <= tMax; ties in t go to the lower
  // face index. Matches raycastFirstBrute exactly for any ray.
  RayHit raycastFirst(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                      double tMin = 0.0,
                      double tMax = std::numeric_limits<double>::infinity()) const;

  // Globally closest surface point; distance ties go to the lower face index.
  SurfacePoint closestPoint(const Eigen::Vector3d& query) const;

  // Like closestPoint but gives up beyond maxDistance: returns an invalid
  // SurfacePoint (face -1) when no face is within that radius.
  SurfacePoint closestPointWithin(const Eigen::Vector3d& query, double maxDistance) const;

  const Aabb3d& bounds() const { return nodes_[0].box; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::int32_t>& faceOrder() const { return faceOrder_; }
  const TriangleMesh& mesh() const { return *mesh_; }

 private:
  int build(std::vector<std::int32_t>& faces, std::vector<Eigen::Vector3d>& centroids, int begin,
            int end, int depth);
  void considerLeaf(const Node& node, const Eigen::Vector3d& query, SurfacePoint& best) const;

  const TriangleMesh* mesh_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> faceOrder_;
};

// O(faces) reference implementations with the same tie rules; used as test
// oracles and as the naive-query mode of the pipeline speed ladder.
RayHit raycastFirstBrute(const TriangleMesh& mesh, const Eigen::Vector3d& origin,
                         const Eigen::Vector3d& dir, double tMin = 0.0,
                         double tMax = std::numeric_limits<double>::infinity());
SurfacePoint closestPointBrute(const TriangleMesh& mesh, const Eigen::Vector3d& query);

}  // namespace meshforge
