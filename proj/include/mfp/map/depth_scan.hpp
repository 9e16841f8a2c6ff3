#pragma once

#include "mfp/types.hpp"

#include <vector>

namespace mfp::map {

/// One depth frame in world coordinates.
struct DepthScan {
  Vec3 origin = Vec3::Zero();
  std::vector<Vec3> points;          // hit endpoints
  std::vector<Vec3> max_range_dirs;  // unit directions with no hit
  double max_range = 10.0;
};

}  // namespace mfp::map
