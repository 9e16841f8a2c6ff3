#pragma once

#include "mfp/collision/cloud_buffer.hpp"
#include "mfp/map/sliding_grid.hpp"
#include "mfp/primitives/primitives.hpp"
#include "mfp/search/occupancy_mask.hpp"

#include <vector>

namespace mfp::collision {

struct ClearanceStats {
  std::size_t samples = 0;
  std::size_t nn_queries = 0;
};

/// Points along a jerk primitive with spacing at most `step` (bounded through
/// the per-step speed envelope), knots included.
std::vector<Vec3> sample_path(const primitives::JerkPrimitive& prim, double step);
std::vector<Vec3> sample_path(const primitives::VelPrimitive& prim, double step);
std::vector<Vec3> sample_polyline(const std::vector<Vec3>& pts, double step);

/// Grid-query form: every sample must query Free (check_unknown) or not
/// Occupied, and keep r_drone from all buffered cloud points. Samples are
/// spaced at voxel_size / 2.
bool primitive_clear(const primitives::JerkPrimitive& prim, const map::SlidingGrid& grid,
                     const CloudBuffer& clouds, double r_drone, bool check_unknown,
                     ClearanceStats* stats = nullptr);

/// True when no non-Free voxel centre lies within r of p; voxels outside the
/// window count as non-Free.
bool point_clear_radius(const map::SlidingGrid& grid, const Vec3& p, double r);

/// Mask form used by the planner: samples must fall on unblocked voxels of
/// `blocked` (typically the grid's unsafe set already dilated by the vehicle
/// radius) and keep r_drone from all buffered cloud points.
bool points_clear(const std::vector<Vec3>& samples, const search::OccupancyMask& blocked,
                  const CloudBuffer& clouds, double r_drone, ClearanceStats* stats = nullptr);

bool primitive_clear(const primitives::JerkPrimitive& prim, const search::OccupancyMask& blocked,
                     const CloudBuffer& clouds, double r_drone, ClearanceStats* stats = nullptr);

}  // namespace mfp::collision
