#pragma once

#include "mfp/map/depth_scan.hpp"
#include "mfp/types.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

namespace mfp::map {

enum class VoxelState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

/// Voxels eligible as the intermediate goal: Free or any Unknown voxel, or
/// Free or Unknown voxels 6-adjacent to Free (frontier).
enum class GoalCandidates { FreeOrUnknown, FreeOrFrontier };

/**
 * @brief Fixed-size voxel window that slides with the vehicle.
 *
 * The window is aligned to a global lattice of pitch `voxel_size`: local
 * voxel (i,j,k) covers world cells [(lo+i)s, (lo+i+1)s) per axis. Sliding is a
 * pure integer shift of that lattice offset, so world<->voxel mapping is exact
 * across slides. Everything outside the window reads as Unknown.
 */
class SlidingGrid {
 public:
  SlidingGrid(const Vec3& center, const Vec3& side_lengths, double voxel_size);

  /// Rebuilds a grid from serialized parts (see grid_io.hpp).
  SlidingGrid(const Vec3& center, const Index3& dims, double voxel_size,
              std::uint64_t stamp, std::vector<std::uint8_t> cells);

  const Index3& dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  std::uint64_t stamp() const { return stamp_; }
  std::size_t cell_count() const { return cells_.size(); }
  const Index3& lattice_origin() const { return lo_; }

  /// World position of the window center (a lattice point for even dims).
  Vec3 center() const;
  /// Lower / upper world corners of the window.
  Vec3 min_corner() const;
  Vec3 max_corner() const;

  bool contains(const Vec3& p) const { return world_to_voxel(p).has_value(); }
  bool in_bounds(const Index3& i) const {
    return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < dims_.x && i.y < dims_.y &&
           i.z < dims_.z;
  }

  /// Half-open binning [lo, hi) per axis. nullopt when p is outside the window.
  std::optional<Index3> world_to_voxel(const Vec3& p) const;
  /// Like world_to_voxel but throws PlanningError(OutOfBounds).
  Index3 voxel_of(const Vec3& p) const;
  Vec3 voxel_center(const Index3& i) const;

  VoxelState state(const Index3& i) const {
    return static_cast<VoxelState>(cells_[linear(i)]);
  }
  void set_state(const Index3& i, VoxelState s) {
    cells_[linear(i)] = static_cast<std::uint8_t>(s);
  }
  VoxelState query(const Vec3& p) const;

  std::size_t linear(const Index3& i) const {
    return static_cast<std::size_t>(i.x) +
           static_cast<std::size_t>(dims_.x) *
               (static_cast<std::size_t>(i.y) +
                static_cast<std::size_t>(dims_.y) * static_cast<std::size_t>(i.z));
  }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  /// Ray-traces the scan into the grid. Pass-through voxels become Free, hit
  /// voxels Occupied; hits are written after all carving so a hit is never
  /// erased by another ray of the same scan. Increments the stamp.
  std::chrono::duration<double> fuse_scan(const DepthScan& scan);

  /// Recenters the window on the lattice point nearest `new_center`. Overlap is
  /// preserved, vacated voxels become Unknown.
  void slide_to(const Vec3& new_center);

  /// True if i is Unknown and 6-adjacent to a Free voxel.
  bool is_frontier(const Index3& i) const;

  /// Intermediate goal selection. Projects g_term into the window along
  /// a->g_term and returns the center of the candidate voxel nearest to the
  /// projection. Candidates may be restricted to a z-range of voxel layers.
  /// Throws PlanningError(NoFeasibleGoal) when no candidate exists.
  Vec3 project_goal(const Vec3& a, const Vec3& g_term,
                    std::optional<std::pair<int, int>> z_layers = std::nullopt,
                    GoalCandidates mode = GoalCandidates::FreeOrUnknown) const;

  /// Point where the ray a->g_term leaves the window (g_term itself when inside).
  Vec3 project_into_window(const Vec3& a, const Vec3& g_term) const;

 private:
  Index3 dims_;
  double voxel_size_;
  Index3 lo_;
  std::uint64_t stamp_ = 0;
  std::vector<std::uint8_t> cells_;
};

}  // namespace mfp::map
