#include "mfp/collision/cloud_buffer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mfp::collision {

void CloudBuffer::push_cloud(std::vector<Vec3> points, std::uint64_t stamp) {
  if (has_stamp_ && stamp <= last_stamp_) {
    std::ostringstream os;
    os << "cloud stamp " << stamp << " not after previous stamp " << last_stamp_;
    throw PlanningError(PlanningError::Code::OrderingError, os.str());
  }
  has_stamp_ = true;
  last_stamp_ = stamp;
  if (stamp <= watermark_) return;  // already covered by the map
  auto cloud = std::make_shared<KdCloud>();
  cloud->tree = KdTree(std::move(points));
  cloud->stamp = stamp;
  clouds_.push_back(std::move(cloud));
  while (clouds_.size() > capacity_) clouds_.pop_front();
}

void CloudBuffer::advance_watermark(std::uint64_t watermark) {
  watermark_ = std::max(watermark_, watermark);
  while (!clouds_.empty() && clouds_.front()->stamp <= watermark_) clouds_.pop_front();
}

double CloudBuffer::nearest_obstacle_distance(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : clouds_) best = std::min(best, c->tree.nearest_sq(p));
  return std::sqrt(best);
}

bool CloudBuffer::any_within(const Vec3& p, double r) const {
  const double r2 = r * r;
  for (const auto& c : clouds_) {
    if (c->tree.nearest_sq(p, r2) < r2) return true;
  }
  return false;
}

}  // namespace mfp::collision
