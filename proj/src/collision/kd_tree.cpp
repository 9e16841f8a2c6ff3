#include "mfp/collision/kd_tree.hpp"

#include <algorithm>
#include <cmath>

namespace mfp::collision {

KdTree::KdTree(std::vector<Vec3> points, int leaf_size)
    : points_(std::move(points)), leaf_size_(std::max(1, leaf_size)) {
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / static_cast<std::size_t>(leaf_size_) + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, -1, 0.0});
  if (end - begin <= static_cast<std::uint32_t>(leaf_size_)) return id;

  Vec3 lo = points_[begin], hi = points_[begin];
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[i]);
    hi = hi.cwiseMax(points_[i]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all coincident: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  auto first = points_.begin() + begin;
  std::nth_element(first, points_.begin() + mid, points_.begin() + end,
                   [axis](const Vec3& a, const Vec3& b) { return a[axis] < b[axis]; });
  const double split = points_[mid][axis];
  const std::int32_t l = build(begin, mid);
  const std::int32_t r = build(mid, end);
  Node& n = nodes_[static_cast<std::size_t>(id)];
  n.axis = static_cast<std::int8_t>(axis);
  n.split = split;
  n.left = l;
  n.right = r;
  return id;
}

void KdTree::search(std::int32_t node, const Vec3& q, double& best, double stop) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  if (n.axis < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      best = std::min(best, (points_[i] - q).squaredNorm());
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[n.axis] - n.split;
  const std::int32_t near = diff < 0.0 ? n.left : n.right;
  const std::int32_t far = diff < 0.0 ? n.right : n.left;
  search(near, q, best, stop);
  if (best < stop) return;
  if (diff * diff < best) search(far, q, best, stop);
}

double KdTree::nearest_sq(const Vec3& q, double stop_below_sq) const {
  double best = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) search(0, q, best, stop_below_sq);
  return best;
}

double KdTree::nearest(const Vec3& q) const { return std::sqrt(nearest_sq(q)); }

}  // namespace mfp::collision
