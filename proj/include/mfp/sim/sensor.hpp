#pragma once

#include "mfp/map/depth_scan.hpp"
#include "mfp/sim/world.hpp"

namespace mfp::sim {

struct SensorConfig {
  int h_rays = 160;
  int v_rays = 90;
  double hfov = 90.0 * M_PI / 180.0;
  double vfov = 60.0 * M_PI / 180.0;
  double max_range = 10.0;
  double rate_hz = 30.0;
};

/// Body-frame unit direction of lattice ray (i, j) for a camera with yaw 0.
Vec3 ray_direction(const SensorConfig& cfg, int i, int j);

/// Raycast scan from `position` looking along `yaw` (no roll or pitch).
map::DepthScan render_depth(const World& world, const Vec3& position, double yaw,
                            const SensorConfig& cfg);

}  // namespace mfp::sim
