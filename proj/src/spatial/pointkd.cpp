#include "meshforge/spatial/pointkd.h"

#include <algorithm>
#include <limits>

#include "meshforge/core/error.h"

namespace meshforge {

namespace {

constexpr int kLeafSize = 16;

struct Candidate {
  double dist2;
  int index;
};

// Strict "closer" order; the index tie-break keeps duplicate points stable.
bool closer(const Candidate& a, const Candidate& b) {
  if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
  return a.index < b.index;
}

double boxDist2(const Eigen::Vector3d& q, const Eigen::Vector3d& lo,
                const Eigen::Vector3d& hi) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = std::max({lo[a] - q[a], 0.0, q[a] - hi[a]});
    d2 += d * d;
  }
  return d2;
}

}  // namespace

PointKdTree::PointKdTree(std::vector<Eigen::Vector3d> points)
    : points_(std::move(points)) {
  for (const auto& p : points_)
    if (!p.allFinite())
      throw Error(ErrorCode::InvalidGeometry, "non-finite point in kd tree");
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  if (!points_.empty()) root_ = build(0, static_cast<int>(points_.size()));
}

int PointKdTree::build(int begin, int end) {
  Node node;
  node.lo = points_[order_[begin]];
  node.hi = node.lo;
  for (int i = begin + 1; i < end; ++i) {
    node.lo = node.lo.cwiseMin(points_[order_[i]]);
    node.hi = node.hi.cwiseMax(points_[order_[i]]);
  }
  node.begin = begin;
  node.end = end;

  if (end - begin > kLeafSize) {
    int axis = 0;
    Eigen::Vector3d extent = node.hi - node.lo;
    if (extent.y() > extent.x()) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;
    int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](int a, int b) {
                       double ca = points_[a][axis], cb = points_[b][axis];
                       if (ca != cb) return ca < cb;
                       return a < b;
                     });
    node.axis = axis;
    node.split = points_[order_[mid]][axis];
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int left = build(begin, mid);
    int right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

std::vector<int> PointKdTree::nearest(const Eigen::Vector3d& query, int k) const {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "nearest() needs k >= 1");
  if (points_.empty()) return {};
  k = std::min<int>(k, static_cast<int>(points_.size()));

  // Max-heap on (dist2, index); top is the current worst keeper.
  std::vector<Candidate> heap;
  heap.reserve(k + 1);
  auto worseFirst = [](const Candidate& a, const Candidate& b) { return closer(a, b); };

  // Manual stack, nearer child visited first.
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (static_cast<int>(heap.size()) == k &&
        boxDist2(query, node.lo, node.hi) > heap.front().dist2)
      continue;
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        int idx = order_[i];
        Candidate c{(points_[idx] - query).squaredNorm(), idx};
        if (static_cast<int>(heap.size()) < k) {
          heap.push_back(c);
          std::push_heap(heap.begin(), heap.end(), worseFirst);
        } else if (closer(c, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), worseFirst);
          heap.back() = c;
          std::push_heap(heap.begin(), heap.end(), worseFirst);
        }
      }
      continue;
    }
    int near = node.left, far = node.right;
    if (query[node.axis] > node.split) std::swap(near, far);
    stack.push_back(far);
    stack.push_back(near);
  }

  std::sort(heap.begin(), heap.end(), closer);
  std::vector<int> out(heap.size());
  for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].index;
  return out;
}

}  // namespace meshforge
