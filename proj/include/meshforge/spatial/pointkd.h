#pragma once

#include <Eigen/Core>
#include <vector>

namespace meshforge {

// Static k-d tree over a fixed set of 3d points, built once, queried for
// k-nearest-neighbour sets. Distance ties resolve to the lower point index,
// so query results are fully deterministic.
class PointKdTree {
 public:
  explicit PointKdTree(std::vector<Eigen::Vector3d> points);

  // Indices of the k nearest points, nearest first. k larger than size()
  // returns everything; k < 1 is rejected.
  std::vector<int> nearest(const Eigen::Vector3d& query, int k) const;

  int size() const { return static_cast<int>(points_.size()); }
  const Eigen::Vector3d& point(int i) const { return points_[i]; }

 private:
  struct Node {
    Eigen::Vector3d lo, hi;  // bounding box of the subtree
    int begin = 0, end = 0;  // leaf payload range in order_
    int axis = -1;           // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(int begin, int end);

  std::vector<Eigen::Vector3d> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace meshforge
