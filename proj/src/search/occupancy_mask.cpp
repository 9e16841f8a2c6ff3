#include "mfp/search/occupancy_mask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfp::search {

OccupancyMask::OccupancyMask(const Index3& dims, const Index3& lo, double voxel_size)
    : dims_(dims), lo_(lo), voxel_size_(voxel_size) {
  stride_y_ = static_cast<std::size_t>(dims.x + 2 * kPad);
  stride_z_ = stride_y_ * static_cast<std::size_t>(dims.y + 2 * kPad);
  data_.assign(stride_z_ * static_cast<std::size_t>(dims.z + 2 * kPad), 1);
  for (int z = 0; z < dims.z; ++z)
    for (int y = 0; y < dims.y; ++y)
      std::fill_n(data_.begin() + static_cast<std::ptrdiff_t>(padded({0, y, z})), dims.x, 0);
}

namespace {

// In-place 1D dilation of `line` (values 0/1) by radius r.
void dilate_line(std::vector<std::uint8_t>& line, std::vector<std::uint8_t>& tmp, int r) {
  const int n = static_cast<int>(line.size());
  tmp.assign(line.begin(), line.end());
  // line[j] = any blocked in [j - r, j + r]; evaluated when i reaches j + r.
  int last = std::numeric_limits<int>::min() / 2;
  for (int i = 0; i < n + r; ++i) {
    if (i < n && tmp[i]) last = i;
    const int j = i - r;
    if (j >= 0 && j < n) line[j] = (i - last <= 2 * r) ? 1 : 0;
  }
}

}  // namespace

OccupancyMask OccupancyMask::from_grid(const map::SlidingGrid& grid, const MaskOptions& opts) {
  const Index3 gd = grid.dims();
  int z0 = 0;
  int z1 = gd.z - 1;
  if (opts.z_layers) {
    z0 = std::max(z0, opts.z_layers->first);
    z1 = std::min(z1, opts.z_layers->second);
  }
  if (z0 > z1) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "empty mask layer range");
  }
  const int r = std::max(0, opts.inflation);
  Index3 lo = grid.lattice_origin();
  lo.z += z0;
  OccupancyMask mask({gd.x, gd.y, z1 - z0 + 1}, lo, grid.voxel_size());

  // Source slab: output layers plus r on each side, including out-of-window
  // layers (which block when unknown_blocks is set).
  const int sz0 = z0 - r;
  const int sz1 = z1 + r;
  const int nz = sz1 - sz0 + 1;
  const int nx = gd.x + 2 * r;
  const int ny = gd.y + 2 * r;
  std::vector<std::uint8_t> src(static_cast<std::size_t>(nx) * ny * nz, 0);
  auto sidx = [&](int x, int y, int z) {
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) *
                                             (static_cast<std::size_t>(y) +
                                              static_cast<std::size_t>(ny) * z);
  };
  const auto& cells = grid.cells();
  const std::uint8_t occ = static_cast<std::uint8_t>(map::VoxelState::Occupied);
  const std::uint8_t unk = static_cast<std::uint8_t>(map::VoxelState::Unknown);
  for (int z = 0; z < nz; ++z) {
    const int gz = sz0 + z;
    for (int y = 0; y < ny; ++y) {
      const int gy = y - r;
      for (int x = 0; x < nx; ++x) {
        const int gx = x - r;
        std::uint8_t b;
        if (gz < 0 || gz >= gd.z || gy < 0 || gy >= gd.y || gx < 0 || gx >= gd.x) {
          b = opts.unknown_blocks ? 1 : 0;
        } else {
          const std::uint8_t c = cells[grid.linear({gx, gy, gz})];
          b = (c == occ || (opts.unknown_blocks && c == unk)) ? 1 : 0;
        }
        src[sidx(x, y, z)] = b;
      }
    }
  }

  if (r > 0) {
    std::vector<std::uint8_t> line, tmp;
    line.resize(static_cast<std::size_t>(nx));
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y) {
        std::copy_n(&src[sidx(0, y, z)], nx, line.begin());
        dilate_line(line, tmp, r);
        std::copy_n(line.begin(), nx, &src[sidx(0, y, z)]);
      }
    line.resize(static_cast<std::size_t>(ny));
    for (int z = 0; z < nz; ++z)
      for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) line[y] = src[sidx(x, y, z)];
        dilate_line(line, tmp, r);
        for (int y = 0; y < ny; ++y) src[sidx(x, y, z)] = line[y];
      }
    line.resize(static_cast<std::size_t>(nz));
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        for (int z = 0; z < nz; ++z) line[z] = src[sidx(x, y, z)];
        dilate_line(line, tmp, r);
        for (int z = 0; z < nz; ++z) src[sidx(x, y, z)] = line[z];
      }
  }

  for (int z = 0; z < mask.dims_.z; ++z)
    for (int y = 0; y < gd.y; ++y)
      for (int x = 0; x < gd.x; ++x)
        mask.data_[mask.padded({x, y, z})] = src[sidx(x + r, y + r, z + r)];
  return mask;
}

std::optional<Index3> OccupancyMask::world_to_index(const Vec3& p) const {
  Index3 i;
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(p[a])) return std::nullopt;
    i[a] = static_cast<int>(std::floor(p[a] / voxel_size_ + 1e-9)) - lo_[a];
  }
  if (!in_bounds(i)) return std::nullopt;
  return i;
}

Vec3 OccupancyMask::center(const Index3& i) const {
  return Vec3(lo_.x + i.x + 0.5, lo_.y + i.y + 0.5, lo_.z + i.z + 0.5) * voxel_size_;
}

bool OccupancyMask::blocked_at(const Vec3& p) const {
  auto i = world_to_index(p);
  return i ? blocked(*i) : true;
}

std::size_t OccupancyMask::blocked_count() const {
  std::size_t n = 0;
  for (int z = 0; z < dims_.z; ++z)
    for (int y = 0; y < dims_.y; ++y)
      for (int x = 0; x < dims_.x; ++x) n += data_[padded({x, y, z})];
  return n;
}

std::optional<Index3> nearest_unblocked(const OccupancyMask& mask, const Index3& target) {
  const Index3 d = mask.dims();
  double best_d2 = std::numeric_limits<double>::infinity();
  std::optional<Index3> best;
  const int max_shell = std::max({d.x, d.y, d.z});
  for (int k = 0; k <= max_shell; ++k) {
    if (best && double(k) * k > best_d2) break;
    for (int dz = -k; dz <= k; ++dz)
      for (int dy = -k; dy <= k; ++dy) {
        const bool face = std::abs(dz) == k || std::abs(dy) == k;
        for (int dx = -k; dx <= k; dx += face ? 1 : 2 * std::max(k, 1)) {
          const Index3 i{target.x + dx, target.y + dy, target.z + dz};
          if (!mask.in_bounds(i) || mask.blocked(i)) continue;
          const double d2 = double(dx) * dx + double(dy) * dy + double(dz) * dz;
          if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
          }
        }
      }
  }
  return best;
}

}  // namespace mfp::search
