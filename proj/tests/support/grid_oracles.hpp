#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

namespace oracle {

/// Dense blocked/free voxel box used by the reference searches.
struct Box {
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> blocked;

  bool in(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < nx && y < ny && z < nz;
  }
  bool free(int x, int y, int z) const { return in(x, y, z) && !blocked[id(x, y, z)]; }
  int id(int x, int y, int z) const { return x + nx * (y + ny * z); }
};

/// Plain A* on the 26-connected lattice, no corner cutting: every partial sum of
/// a move's components must be free. Returns the path cost or nullopt.
/// When `dijkstra` is set the heuristic is zero.
inline std::optional<double> shortest(const Box& b, int sx, int sy, int sz, int gx, int gy,
                                      int gz, bool dijkstra = false) {
  if (!b.free(gx, gy, gz)) return std::nullopt;
  auto h = [&](int x, int y, int z) {
    if (dijkstra) return 0.0;
    int d[3] = {std::abs(x - gx), std::abs(y - gy), std::abs(z - gz)};
    std::sort(d, d + 3);
    return std::sqrt(3.0) * d[0] + std::sqrt(2.0) * (d[1] - d[0]) + (d[2] - d[1]);
  };
  const std::size_t n = b.blocked.size();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<char> closed(n, 0);
  using E = std::pair<double, int>;
  std::priority_queue<E, std::vector<E>, std::greater<E>> open;
  const int s = b.id(sx, sy, sz);
  g[s] = 0.0;
  open.push({h(sx, sy, sz), s});
  const int goal = b.id(gx, gy, gz);
  while (!open.empty()) {
    const int c = open.top().second;
    open.pop();
    if (closed[c]) continue;
    closed[c] = 1;
    if (c == goal) return g[c];
    const int cx = c % b.nx, cy = (c / b.nx) % b.ny, cz = c / (b.nx * b.ny);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          if (!dx && !dy && !dz) continue;
          bool ok = true;
          // all nonzero sub-vectors of (dx,dy,dz)
          for (int m = 1; m < 8 && ok; ++m) {
            int ex = (m & 1) ? dx : 0, ey = (m & 2) ? dy : 0, ez = (m & 4) ? dz : 0;
            if ((m & 1 && !dx) || (m & 2 && !dy) || (m & 4 && !dz)) continue;
            ok = b.free(cx + ex, cy + ey, cz + ez);
          }
          if (!ok) continue;
          const int nid = b.id(cx + dx, cy + dy, cz + dz);
          const double w = std::sqrt(double(dx * dx + dy * dy + dz * dz));
          if (g[c] + w < g[nid]) {
            g[nid] = g[c] + w;
            open.push({g[nid] + h(cx + dx, cy + dy, cz + dz), nid});
          }
        }
  }
  return std::nullopt;
}

}  // namespace oracle
