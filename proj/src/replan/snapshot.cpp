#include "mfp/replan/snapshot.hpp"

#include <cmath>

namespace mfp::replan {

std::pair<int, int> band_layers(const map::SlidingGrid& grid, double z_min, double z_max) {
  const double s = grid.voxel_size();
  const int lo = grid.lattice_origin().z;
  // Layers whose voxel centre lies inside the band.
  int z0 = static_cast<int>(std::ceil(z_min / s - 0.5 - 1e-9)) - lo;
  int z1 = static_cast<int>(std::floor(z_max / s - 0.5 + 1e-9)) - lo;
  z0 = std::max(z0, 0);
  z1 = std::min(z1, grid.dims().z - 1);
  if (z0 > z1) {
    throw PlanningError(PlanningError::Code::InvalidArgument,
                        "flight band does not overlap the map window");
  }
  return {z0, z1};
}

MapSnapshot make_snapshot(std::shared_ptr<const map::SlidingGrid> grid,
                          const SnapshotOptions& opts) {
  MapSnapshot snap;
  snap.band_layers = band_layers(*grid, opts.z_min, opts.z_max);
  snap.inflation =
      static_cast<int>(std::ceil(opts.r_drone / grid->voxel_size() - 1e-9)) + opts.margin_voxels;
  search::MaskOptions mo;
  mo.inflation = snap.inflation;
  mo.z_layers = snap.band_layers;
  snap.jps = search::OccupancyMask::from_grid(*grid, mo);
  mo.unknown_blocks = true;
  snap.safe = search::OccupancyMask::from_grid(*grid, mo);
  snap.grid = std::move(grid);
  return snap;
}

}  // namespace mfp::replan
