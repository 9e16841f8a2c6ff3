#include "mfp/sim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace mfp::sim {

Index3 OracleGrid::cell_of(const Vec3& p) const {
  Index3 i;
  for (int k = 0; k < 3; ++k) {
    i[k] = static_cast<int>(std::floor((p[k] - origin[k]) / voxel + 1e-9));
  }
  return i;
}

Vec3 OracleGrid::center(const Index3& i) const {
  return origin + voxel * Vec3(i.x + 0.5, i.y + 0.5, i.z + 0.5);
}

OracleGrid rasterize(const World& world, const OracleOptions& opts) {
  if (opts.voxel <= 0.0 || opts.z_max <= opts.z_min) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "rasterize: bad options");
  }
  OracleGrid g;
  g.voxel = opts.voxel;
  g.origin = Vec3(world.bounds_min.x(), world.bounds_min.y(), opts.z_min);
  g.dims.x = static_cast<int>(std::ceil((world.bounds_max.x() - world.bounds_min.x()) / opts.voxel));
  g.dims.y = static_cast<int>(std::ceil((world.bounds_max.y() - world.bounds_min.y()) / opts.voxel));
  g.dims.z = std::max(1, static_cast<int>(std::floor((opts.z_max - opts.z_min) / opts.voxel + 1e-9)));
  g.blocked.assign(static_cast<std::size_t>(g.dims.x) * g.dims.y * g.dims.z, 0);

  // Stamp each obstacle over its inflated bounding box.
  auto stamp = [&](const Vec3& lo, const Vec3& hi, auto&& dist) {
    Index3 a = g.cell_of(lo - Vec3::Constant(opts.inflation));
    Index3 b = g.cell_of(hi + Vec3::Constant(opts.inflation));
    for (int k = 0; k < 3; ++k) {
      a[k] = std::max(a[k], 0);
      b[k] = std::min(b[k], g.dims[k] - 1);
    }
    for (int z = a.z; z <= b.z; ++z)
      for (int y = a.y; y <= b.y; ++y)
        for (int x = a.x; x <= b.x; ++x) {
          const Index3 i{x, y, z};
          if (dist(g.center(i)) < opts.inflation) g.blocked[g.linear(i)] = 1;
        }
  };
  for (const auto& bx : world.boxes) {
    stamp(bx.center - 0.5 * bx.size, bx.center + 0.5 * bx.size,
          [&](const Vec3& p) { return box_distance(bx, p); });
  }
  for (const auto& c : world.cylinders) {
    stamp(Vec3(c.cx - c.radius, c.cy - c.radius, c.z_min),
          Vec3(c.cx + c.radius, c.cy + c.radius, c.z_max),
          [&](const Vec3& p) { return cylinder_distance(c, p); });
  }
  return g;
}

std::optional<double> grid_shortest(const OracleGrid& grid, const Vec3& a, const Vec3& g,
                                    bool dijkstra) {
  const Index3 s = grid.cell_of(a);
  const Index3 t = grid.cell_of(g);
  if (!grid.in_bounds(s) || !grid.in_bounds(t)) {
    throw PlanningError(PlanningError::Code::OutOfBounds, "oracle: endpoint outside the grid");
  }
  if (grid.blocked[grid.linear(t)]) return std::nullopt;

  auto free = [&](const Index3& i) {
    return grid.in_bounds(i) && (!grid.blocked[grid.linear(i)] || i == s);
  };
  auto h = [&](const Index3& i) {
    if (dijkstra) return 0.0;
    int d[3] = {std::abs(i.x - t.x), std::abs(i.y - t.y), std::abs(i.z - t.z)};
    std::sort(d, d + 3);
    return std::sqrt(3.0) * d[0] + std::sqrt(2.0) * (d[1] - d[0]) + (d[2] - d[1]);
  };

  const std::size_t n = grid.blocked.size();
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<char> closed(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t sid = grid.linear(s);
  const std::size_t tid = grid.linear(t);
  cost[sid] = 0.0;
  open.push({h(s), sid});
  const auto nx = static_cast<std::size_t>(grid.dims.x);
  const auto nxy = nx * static_cast<std::size_t>(grid.dims.y);
  while (!open.empty()) {
    const std::size_t c = open.top().second;
    open.pop();
    if (closed[c]) continue;
    closed[c] = 1;
    if (c == tid) return cost[c] * grid.voxel;
    const Index3 ci{static_cast<int>(c % nx), static_cast<int>((c / nx) % grid.dims.y),
                    static_cast<int>(c / nxy)};
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dx && !dy && !dz) continue;
          bool ok = true;
          for (int m = 1; m < 8 && ok; ++m) {
            if (((m & 1) && !dx) || ((m & 2) && !dy) || ((m & 4) && !dz)) continue;
            ok = free(ci + Index3{(m & 1) ? dx : 0, (m & 2) ? dy : 0, (m & 4) ? dz : 0});
          }
          if (!ok) continue;
          const Index3 ni = ci + Index3{dx, dy, dz};
          const std::size_t nid = grid.linear(ni);
          if (closed[nid]) continue;
          const double w = std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
          if (cost[c] + w < cost[nid]) {
            cost[nid] = cost[c] + w;
            open.push({cost[nid] + h(ni), nid});
          }
        }
  }
  return std::nullopt;
}

std::optional<double> oracle_shortest_path(const World& world, const OracleOptions& opts,
                                           const Vec3& a, const Vec3& g) {
  return grid_shortest(rasterize(world, opts), a, g, false);
}

}  // namespace mfp::sim
