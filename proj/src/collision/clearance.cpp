#include "mfp/collision/clearance.hpp"

#include <cmath>

namespace mfp::collision {

using primitives::FlatState;

std::vector<Vec3> sample_path(const primitives::JerkPrimitive& prim, double step) {
  std::vector<Vec3> out;
  out.push_back(prim.x0.pos);
  for (int k = 0; k < prim.N; ++k) {
    const FlatState& x = prim.knots[static_cast<std::size_t>(k)];
    const Vec3& u = prim.inputs[static_cast<std::size_t>(k)];
    const double dt = prim.dt;
    // Upper bound on the arc length travelled during this step.
    const double bound =
        (x.vel.norm() + x.acc.norm() * dt + 0.5 * u.norm() * dt * dt) * dt;
    const int m = std::max(1, static_cast<int>(std::ceil(bound / step)));
    for (int i = 1; i < m; ++i) {
      out.push_back(primitives::propagate(x, u, dt * i / m).pos);
    }
    out.push_back(prim.knots[static_cast<std::size_t>(k) + 1].pos);
  }
  return out;
}

std::vector<Vec3> sample_path(const primitives::VelPrimitive& prim, double step) {
  std::vector<Vec3> pts{prim.p0};
  Vec3 p = prim.p0;
  for (const Vec3& v : prim.inputs) {
    p += v * prim.dt;
    pts.push_back(p);
  }
  return sample_polyline(pts, step);
}

std::vector<Vec3> sample_polyline(const std::vector<Vec3>& pts, double step) {
  std::vector<Vec3> out;
  if (pts.empty()) return out;
  out.push_back(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec3 d = pts[i] - pts[i - 1];
    const int m = std::max(1, static_cast<int>(std::ceil(d.norm() / step)));
    for (int k = 1; k <= m; ++k) out.push_back(pts[i - 1] + d * (double(k) / m));
  }
  return out;
}

bool primitive_clear(const primitives::JerkPrimitive& prim, const map::SlidingGrid& grid,
                     const CloudBuffer& clouds, double r_drone, bool check_unknown,
                     ClearanceStats* stats) {
  for (const Vec3& p : sample_path(prim, 0.5 * grid.voxel_size())) {
    if (stats) ++stats->samples;
    const map::VoxelState s = grid.query(p);
    if (check_unknown ? s != map::VoxelState::Free : s == map::VoxelState::Occupied) return false;
    if (stats) ++stats->nn_queries;
    if (clouds.any_within(p, r_drone)) return false;
  }
  return true;
}

bool point_clear_radius(const map::SlidingGrid& grid, const Vec3& p, double r) {
  const int reach = static_cast<int>(std::ceil(r / grid.voxel_size())) + 1;
  const Index3 c = grid.voxel_of(p);
  for (int dz = -reach; dz <= reach; ++dz)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        const Index3 i = c + Index3{dx, dy, dz};
        if (grid.in_bounds(i) && grid.state(i) == map::VoxelState::Free) continue;
        if ((grid.voxel_center(i) - p).norm() < r) return false;
      }
  return true;
}

bool points_clear(const std::vector<Vec3>& samples, const search::OccupancyMask& blocked,
                  const CloudBuffer& clouds, double r_drone, ClearanceStats* stats) {
  // Cheap map test over all samples first, then the cloud queries.
  for (const Vec3& p : samples) {
    if (stats) ++stats->samples;
    if (blocked.blocked_at(p)) return false;
  }
  if (clouds.size() == 0) return true;
  for (const Vec3& p : samples) {
    if (stats) ++stats->nn_queries;
    if (clouds.any_within(p, r_drone)) return false;
  }
  return true;
}

bool primitive_clear(const primitives::JerkPrimitive& prim, const search::OccupancyMask& blocked,
                     const CloudBuffer& clouds, double r_drone, ClearanceStats* stats) {
  return points_clear(sample_path(prim, 0.5 * blocked.voxel_size()), blocked, clouds, r_drone,
                      stats);
}

}  // namespace mfp::collision
