#include "mfp/sim/sensor.hpp"

#include <cmath>

namespace mfp::sim {

Vec3 ray_direction(const SensorConfig& cfg, int i, int j) {
  const double h = -0.5 * cfg.hfov + (i + 0.5) * cfg.hfov / cfg.h_rays;
  const double v = -0.5 * cfg.vfov + (j + 0.5) * cfg.vfov / cfg.v_rays;
  return Vec3(std::cos(v) * std::cos(h), std::cos(v) * std::sin(h), std::sin(v));
}

map::DepthScan render_depth(const World& world, const Vec3& position, double yaw,
                            const SensorConfig& cfg) {
  if (cfg.h_rays <= 0 || cfg.v_rays <= 0 || cfg.max_range <= 0.0) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "render_depth: bad sensor config");
  }
  const World local = world.subset_near(position, cfg.max_range);
  map::DepthScan scan;
  scan.origin = position;
  scan.max_range = cfg.max_range;
  scan.points.reserve(static_cast<std::size_t>(cfg.h_rays) * cfg.v_rays);
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);
  for (int j = 0; j < cfg.v_rays; ++j) {
    for (int i = 0; i < cfg.h_rays; ++i) {
      const Vec3 b = ray_direction(cfg, i, j);
      const Vec3 d(cy * b.x() - sy * b.y(), sy * b.x() + cy * b.y(), b.z());
      if (auto t = local.raycast(position, d, cfg.max_range)) {
        scan.points.push_back(position + *t * d);
      } else {
        scan.max_range_dirs.push_back(d);
      }
    }
  }
  return scan;
}

}  // namespace mfp::sim
