#include "wbl/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace wbl {

namespace {

constexpr int kLeafSize = 8;

double box_distance_sq(const Vec3& q, const Vec3& lo, const Vec3& hi) {
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = std::max({lo[k] - q[k], 0.0, q[k] - hi[k]});
    d2 += d * d;
  }
  return d2;
}

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<int>(points_.size()));
  }
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, -1, 0, 0.0, Vec3::Zero(), Vec3::Zero()});
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  nodes_[id].lo = lo;
  nodes_[id].hi = hi;
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::pair<int, double> KdTree::nearest(const Vec3& q) const {
  if (points_.empty()) throw Error(ErrorCode::EmptySample, "nearest query on an empty tree");
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  nearest_rec(0, q, best, best_d2);
  return {best, (points_[best] - q).norm()};
}

void KdTree::nearest_rec(int id, const Vec3& q, int& best, double& best_d2) const {
  const Node& n = nodes_[id];
  if (box_distance_sq(q, n.lo, n.hi) > best_d2) return;
  if (n.left < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const int p = order_[i];
      const double d2 = (points_[p] - q).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && p < best)) {
        best_d2 = d2;
        best = p;
      }
    }
    return;
  }
  const bool go_left = q[n.axis] < n.split;
  nearest_rec(go_left ? n.left : n.right, q, best, best_d2);
  nearest_rec(go_left ? n.right : n.left, q, best, best_d2);
}

std::vector<int> KdTree::within(const Vec3& q, double radius) const {
  std::vector<int> out;
  if (!points_.empty() && radius > 0.0) within_rec(0, q, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::within_rec(int id, const Vec3& q, double r2, std::vector<int>& out) const {
  const Node& n = nodes_[id];
  if (box_distance_sq(q, n.lo, n.hi) >= r2) return;
  if (n.left < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      if ((points_[order_[i]] - q).squaredNorm() < r2) out.push_back(order_[i]);
    }
    return;
  }
  within_rec(n.left, q, r2, out);
  within_rec(n.right, q, r2, out);
}

}  // namespace wbl
