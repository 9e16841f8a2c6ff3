#pragma once

#include "mfp/collision/kd_tree.hpp"

#include <cstdint>
#include <deque>
#include <memory>

namespace mfp::collision {

struct KdCloud {
  KdTree tree;
  std::uint64_t stamp = 0;
  std::size_t size() const { return tree.size(); }
};

/**
 * @brief Recent sensor clouds that the map has not absorbed yet.
 *
 * Copies are cheap point-in-time views (clouds are shared and immutable).
 */
class CloudBuffer {
 public:
  explicit CloudBuffer(std::size_t capacity = 4) : capacity_(capacity) {}

  /// Throws PlanningError(OrderingError) unless stamp exceeds every stamp seen.
  void push_cloud(std::vector<Vec3> points, std::uint64_t stamp);
  /// Marks clouds with stamp <= watermark as fused and evicts them.
  void advance_watermark(std::uint64_t watermark);

  std::size_t size() const { return clouds_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t watermark() const { return watermark_; }
  const std::deque<std::shared_ptr<const KdCloud>>& clouds() const { return clouds_; }

  /// Exact distance to the nearest buffered point; +inf when empty.
  double nearest_obstacle_distance(const Vec3& p) const;
  /// True when some buffered point is strictly closer than r.
  bool any_within(const Vec3& p, double r) const;

 private:
  std::size_t capacity_;
  std::uint64_t watermark_ = 0;
  std::uint64_t last_stamp_ = 0;
  bool has_stamp_ = false;
  std::deque<std::shared_ptr<const KdCloud>> clouds_;
};

}  // namespace mfp::collision
