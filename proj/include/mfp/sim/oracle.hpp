#pragma once

#include "mfp/sim/world.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mfp::sim {

/// Ground truth rasterized on the flight band; a cell is blocked when its
/// centre lies closer than `inflation` to an obstacle.
struct OracleGrid {
  Vec3 origin = Vec3::Zero();  // min corner
  double voxel = 0.1;
  Index3 dims;
  std::vector<std::uint8_t> blocked;

  std::size_t linear(const Index3& i) const {
    return static_cast<std::size_t>(i.x) +
           static_cast<std::size_t>(dims.x) *
               (static_cast<std::size_t>(i.y) + static_cast<std::size_t>(dims.y) * i.z);
  }
  bool in_bounds(const Index3& i) const {
    return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < dims.x && i.y < dims.y && i.z < dims.z;
  }
  Index3 cell_of(const Vec3& p) const;
  Vec3 center(const Index3& i) const;
};

struct OracleOptions {
  double voxel = 0.1;
  double inflation = 0.3;
  double z_min = 1.0;
  double z_max = 2.0;
};

OracleGrid rasterize(const World& world, const OracleOptions& opts);

/// 26-connected shortest path cost (metres) between the cells of a and g,
/// with no corner cutting. Dijkstra when `dijkstra` is set, A* otherwise.
std::optional<double> grid_shortest(const OracleGrid& grid, const Vec3& a, const Vec3& g,
                                    bool dijkstra = false);

/// Known-map reference length from a to g; nullopt when disconnected.
std::optional<double> oracle_shortest_path(const World& world, const OracleOptions& opts,
                                           const Vec3& a, const Vec3& g);

}  // namespace mfp::sim
