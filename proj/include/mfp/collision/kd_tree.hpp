#pragma once

#include "mfp/types.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace mfp::collision {

/// Static 3D k-d tree with exact nearest-neighbour queries.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points, int leaf_size = 8);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }

  /// Squared distance to the nearest point; +inf when empty. Search is cut
  /// short once a point closer than sqrt(stop_below_sq) is found.
  double nearest_sq(const Vec3& q, double stop_below_sq = -1.0) const;
  double nearest(const Vec3& q) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int8_t axis = -1;  // -1 for a leaf
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, double& best, double stop) const;

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  int leaf_size_ = 8;
};

}  // namespace mfp::collision
