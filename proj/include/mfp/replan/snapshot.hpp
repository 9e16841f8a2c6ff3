#pragma once

#include "mfp/map/sliding_grid.hpp"
#include "mfp/search/occupancy_mask.hpp"

#include <memory>
#include <utility>

namespace mfp::replan {

struct SnapshotOptions {
  double r_drone = 0.3;
  /// Extra voxels of dilation on top of ceil(r_drone / s).
  int margin_voxels = 1;
  /// World z interval the vehicle is allowed to occupy.
  double z_min = 1.0;
  double z_max = 2.0;
};

/**
 * @brief Immutable published view of the map used by one replan.
 *
 * Carries the raw grid plus the two derived masks over the flight band:
 * `jps` blocks the dilated Occupied set (Unknown is traversable), `safe`
 * blocks the dilated Occupied and Unknown set.
 */
struct MapSnapshot {
  std::shared_ptr<const map::SlidingGrid> grid;
  search::OccupancyMask jps;
  search::OccupancyMask safe;
  std::pair<int, int> band_layers{0, 0};
  int inflation = 0;

  std::uint64_t stamp() const { return grid ? grid->stamp() : 0; }
};

/// Window z-layers covering [z_min, z_max], clamped to the window.
std::pair<int, int> band_layers(const map::SlidingGrid& grid, double z_min, double z_max);

MapSnapshot make_snapshot(std::shared_ptr<const map::SlidingGrid> grid,
                          const SnapshotOptions& opts);

}  // namespace mfp::replan
