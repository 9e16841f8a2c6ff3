#pragma once

#include "mfp/search/grid_path.hpp"
#include "mfp/search/occupancy_mask.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace mfp::search {

/// The 26 unit moves of the voxel lattice and their Euclidean costs.
struct Move {
  Index3 d;
  int dim = 0;  // number of non-zero components
  double cost = 0.0;
};
const std::array<Move, 26>& moves();

/// A move is legal when the target and every axis-aligned intermediate cell
/// (all partial sums of its components) are unblocked: no corner cutting.
bool move_legal(const OccupancyMask& mask, const Index3& from, const Index3& d);

/// Octile-style 3D distance, exact shortest length on an empty 26-connected grid.
double lattice_distance(const Index3& a, const Index3& b);

struct JpsStats {
  std::size_t expansions = 0;
  std::size_t jump_steps = 0;
};

/// Jump point search between voxel indices. Returns the jump points (start
/// first, goal last; collinear interior points removed), or nullopt when the
/// goal is unreachable. The start voxel is treated as traversable even if
/// blocked so a vehicle inside an inflated obstacle margin can still leave it.
std::optional<std::vector<Index3>> jps_search_index(const OccupancyMask& mask,
                                                    const Index3& start, const Index3& goal,
                                                    JpsStats* stats = nullptr);

/// World-coordinate wrapper. A blocked goal is replaced by the nearest
/// unblocked voxel. Throws PlanningError(OutOfBounds) for points outside the
/// mask; nullopt means no path.
std::optional<GridPath> jps_search(const OccupancyMask& mask, const Vec3& start,
                                   const Vec3& goal, JpsStats* stats = nullptr);

/// Length of an index path measured on voxel centres.
double index_path_length(const std::vector<Index3>& path);

}  // namespace mfp::search
