#pragma once

#include <utility>
#include <vector>

#include "wbl/mesh.hpp"

namespace wbl {

/// Static 3-d tree over a point set. Queries are exact and read-only, so a
/// built tree can be shared between threads.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

  /// Index of the nearest point and its distance. Ties resolve to the
  /// lowest index. Throws EmptySample on an empty tree.
  std::pair<int, double> nearest(const Vec3& q) const;

  /// Indices of all points with |p - q| < radius, ascending.
  std::vector<int> within(const Vec3& q, double radius) const;

 private:
  struct Node {
    int begin, end;      // range in order_
    int left = -1, right = -1;
    int axis = 0;
    double split = 0.0;
    Vec3 lo, hi;         // bounding box
  };
  int build(int begin, int end);
  void nearest_rec(int node, const Vec3& q, int& best, double& best_d2) const;
  void within_rec(int node, const Vec3& q, double r2, std::vector<int>& out) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace wbl
