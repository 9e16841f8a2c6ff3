#pragma once

#include "mfp/map/sliding_grid.hpp"
#include "mfp/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace mfp::search {

struct MaskOptions {
  /// Dilation radius (box, in voxels) applied to the blocking set.
  int inflation = 0;
  /// Treat Unknown (and everything outside the window) as blocking too.
  bool unknown_blocks = false;
  /// Restrict the mask to these window z-layers (inclusive); others are out of bounds.
  std::optional<std::pair<int, int>> z_layers;
};

/**
 * @brief Binary traversability grid derived from a map snapshot.
 *
 * Shares the global voxel lattice of the SlidingGrid it was built from; may
 * cover only a slab of it. Storage carries a blocked border of `kPad` voxels
 * so neighbourhood lookups never need bounds checks.
 */
class OccupancyMask {
 public:
  static constexpr int kPad = 2;

  OccupancyMask() = default;
  /// All-free mask over `dims` voxels whose local (0,0,0) sits at global lattice `lo`.
  OccupancyMask(const Index3& dims, const Index3& lo, double voxel_size);

  static OccupancyMask from_grid(const map::SlidingGrid& grid, const MaskOptions& opts = {});

  const Index3& dims() const { return dims_; }
  const Index3& lattice_origin() const { return lo_; }
  double voxel_size() const { return voxel_size_; }

  bool in_bounds(const Index3& i) const {
    return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < dims_.x && i.y < dims_.y &&
           i.z < dims_.z;
  }
  /// Out-of-bounds indices are blocked.
  bool blocked(const Index3& i) const { return in_bounds(i) ? data_[padded(i)] != 0 : true; }
  void set_blocked(const Index3& i, bool b) { data_[padded(i)] = b ? 1 : 0; }

  std::optional<Index3> world_to_index(const Vec3& p) const;
  Vec3 center(const Index3& i) const;
  bool blocked_at(const Vec3& p) const;

  /// Padded linear addressing, exposed for the search inner loops.
  std::size_t padded(const Index3& i) const {
    return static_cast<std::size_t>(i.x + kPad) +
           stride_y_ * static_cast<std::size_t>(i.y + kPad) +
           stride_z_ * static_cast<std::size_t>(i.z + kPad);
  }
  std::ptrdiff_t offset(const Index3& d) const {
    return d.x + static_cast<std::ptrdiff_t>(stride_y_) * d.y +
           static_cast<std::ptrdiff_t>(stride_z_) * d.z;
  }
  const std::uint8_t* raw() const { return data_.data(); }
  std::uint8_t* raw() { return data_.data(); }

  std::size_t blocked_count() const;

 private:
  Index3 dims_{};
  Index3 lo_{};
  double voxel_size_ = 1.0;
  std::size_t stride_y_ = 0;
  std::size_t stride_z_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Nearest unblocked voxel (Euclidean over voxel centres) to `target`.
std::optional<Index3> nearest_unblocked(const OccupancyMask& mask, const Index3& target);

}  // namespace mfp::search
