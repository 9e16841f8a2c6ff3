#include "mfp/map/sliding_grid.hpp"

#include "mfp/map/bresenham.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace mfp::map {

namespace {

// Points closer than this (in voxel units) below a lattice plane are binned
// above it, so that k*s lands in voxel k despite rounding in k*s.
constexpr double kLatticeSnap = 1e-9;

int global_index(double coord, double s) {
  return static_cast<int>(std::floor(coord / s + kLatticeSnap));
}

Index3 lattice_origin_for(const Vec3& center, const Index3& dims, double s) {
  Index3 lo;
  for (int a = 0; a < 3; ++a) {
    lo[a] = static_cast<int>(std::lround(center[a] / s)) - dims[a] / 2;
  }
  return lo;
}

}  // namespace

SlidingGrid::SlidingGrid(const Vec3& center, const Vec3& side_lengths, double voxel_size)
    : voxel_size_(voxel_size) {
  if (!(voxel_size > 0.0)) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "voxel size must be > 0");
  }
  for (int a = 0; a < 3; ++a) {
    dims_[a] = static_cast<int>(std::lround(side_lengths[a] / voxel_size));
    if (dims_[a] <= 0) {
      throw PlanningError(PlanningError::Code::InvalidArgument,
                          "map side length shorter than one voxel");
    }
  }
  lo_ = lattice_origin_for(center, dims_, voxel_size_);
  cells_.assign(static_cast<std::size_t>(dims_.x) * dims_.y * dims_.z,
                static_cast<std::uint8_t>(VoxelState::Unknown));
}

SlidingGrid::SlidingGrid(const Vec3& center, const Index3& dims, double voxel_size,
                         std::uint64_t stamp, std::vector<std::uint8_t> cells)
    : dims_(dims), voxel_size_(voxel_size), stamp_(stamp), cells_(std::move(cells)) {
  if (static_cast<std::size_t>(dims.x) * dims.y * dims.z != cells_.size()) {
    throw PlanningError(PlanningError::Code::InvalidArgument,
                        "cell array size does not match dims");
  }
  lo_ = lattice_origin_for(center, dims_, voxel_size_);
}

Vec3 SlidingGrid::center() const {
  Vec3 c;
  for (int a = 0; a < 3; ++a) c[a] = (lo_[a] + dims_[a] / 2) * voxel_size_;
  return c;
}

Vec3 SlidingGrid::min_corner() const {
  return Vec3(lo_.x, lo_.y, lo_.z) * voxel_size_;
}

Vec3 SlidingGrid::max_corner() const {
  return Vec3(lo_.x + dims_.x, lo_.y + dims_.y, lo_.z + dims_.z) * voxel_size_;
}

std::optional<Index3> SlidingGrid::world_to_voxel(const Vec3& p) const {
  Index3 i;
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(p[a])) return std::nullopt;
    i[a] = global_index(p[a], voxel_size_) - lo_[a];
  }
  if (!in_bounds(i)) return std::nullopt;
  return i;
}

Index3 SlidingGrid::voxel_of(const Vec3& p) const {
  auto i = world_to_voxel(p);
  if (!i) {
    std::ostringstream os;
    os << "point (" << p.x() << ", " << p.y() << ", " << p.z() << ") outside map window";
    throw PlanningError(PlanningError::Code::OutOfBounds, os.str());
  }
  return *i;
}

Vec3 SlidingGrid::voxel_center(const Index3& i) const {
  return Vec3(lo_.x + i.x + 0.5, lo_.y + i.y + 0.5, lo_.z + i.z + 0.5) * voxel_size_;
}

VoxelState SlidingGrid::query(const Vec3& p) const {
  auto i = world_to_voxel(p);
  return i ? state(*i) : VoxelState::Unknown;
}

namespace {

// Parameter in (0, 1] at which origin + t*d leaves the box. origin is inside.
double exit_parameter(const Vec3& origin, const Vec3& d, const Vec3& lo, const Vec3& hi) {
  double t = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      t = std::min(t, (hi[a] - origin[a]) / d[a]);
    } else if (d[a] < 0.0) {
      t = std::min(t, (lo[a] - origin[a]) / d[a]);
    }
  }
  return std::max(t, 0.0);
}

}  // namespace

std::chrono::duration<double> SlidingGrid::fuse_scan(const DepthScan& scan) {
  const auto t0 = std::chrono::steady_clock::now();
  const Index3 o = voxel_of(scan.origin);
  const Vec3 lo = min_corner();
  const Vec3 hi = max_corner();

  auto clamp_index = [&](const Vec3& p) {
    Index3 i;
    for (int a = 0; a < 3; ++a) {
      i[a] = std::clamp(global_index(p[a], voxel_size_) - lo_[a], 0, dims_[a] - 1);
    }
    return i;
  };
  auto carve_all = [&](const Index3& end) {
    bresenham3d_visit(o, end, [&](const Index3& v) {
      cells_[linear(v)] = static_cast<std::uint8_t>(VoxelState::Free);
    });
  };
  auto carve_clipped = [&](const Vec3& end) {
    const Vec3 d = end - scan.origin;
    const double t = exit_parameter(scan.origin, d, lo, hi);
    carve_all(clamp_index(scan.origin + t * d));
  };

  std::vector<Index3> hits;
  hits.reserve(scan.points.size());
  for (const Vec3& p : scan.points) {
    if (auto e = world_to_voxel(p)) {
      const Index3 end = *e;
      bresenham3d_visit(o, end, [&](const Index3& v) {
        if (!(v == end)) cells_[linear(v)] = static_cast<std::uint8_t>(VoxelState::Free);
      });
      hits.push_back(end);
    } else {
      carve_clipped(p);
    }
  }
  for (const Vec3& dir : scan.max_range_dirs) {
    const Vec3 end = scan.origin + dir.normalized() * scan.max_range;
    if (auto e = world_to_voxel(end)) {
      carve_all(*e);
    } else {
      carve_clipped(end);
    }
  }
  for (const Index3& h : hits) {
    cells_[linear(h)] = static_cast<std::uint8_t>(VoxelState::Occupied);
  }
  ++stamp_;
  return std::chrono::steady_clock::now() - t0;
}

void SlidingGrid::slide_to(const Vec3& new_center) {
  const Index3 new_lo = lattice_origin_for(new_center, dims_, voxel_size_);
  const Index3 shift = new_lo - lo_;
  if (shift == Index3{}) return;

  std::vector<std::uint8_t> next(cells_.size(),
                                 static_cast<std::uint8_t>(VoxelState::Unknown));
  // New local x range whose old counterpart x + shift.x lies inside the window.
  const int x0 = std::max(0, -shift.x);
  const int x1 = std::min(dims_.x, dims_.x - shift.x);
  if (x1 > x0) {
    for (int z = 0; z < dims_.z; ++z) {
      const int oz = z + shift.z;
      if (oz < 0 || oz >= dims_.z) continue;
      for (int y = 0; y < dims_.y; ++y) {
        const int oy = y + shift.y;
        if (oy < 0 || oy >= dims_.y) continue;
        std::memcpy(&next[linear({x0, y, z})], &cells_[linear({x0 + shift.x, oy, oz})],
                    static_cast<std::size_t>(x1 - x0));
      }
    }
  }
  cells_ = std::move(next);
  lo_ = new_lo;
}

bool SlidingGrid::is_frontier(const Index3& i) const {
  if (state(i) != VoxelState::Unknown) return false;
  static constexpr Index3 kFaces[6] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                       {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  for (const Index3& f : kFaces) {
    const Index3 n = i + f;
    if (in_bounds(n) && state(n) == VoxelState::Free) return true;
  }
  return false;
}

Vec3 SlidingGrid::project_into_window(const Vec3& a, const Vec3& g_term) const {
  if (contains(g_term)) return g_term;
  const Vec3 d = g_term - a;
  const double t = exit_parameter(a, d, min_corner(), max_corner());
  // Pull back a hair so the point bins into the boundary voxel.
  const double len = d.norm();
  const double back = len > 0.0 ? std::min(t, 1e-6 / len) : 0.0;
  return a + (t - back) * d;
}

Vec3 SlidingGrid::project_goal(const Vec3& a, const Vec3& g_term,
                               std::optional<std::pair<int, int>> z_layers,
                               GoalCandidates mode) const {
  const Vec3 q = project_into_window(a, g_term);
  Index3 qi;
  for (int ax = 0; ax < 3; ++ax) {
    qi[ax] = std::clamp(global_index(q[ax], voxel_size_) - lo_[ax], 0, dims_[ax] - 1);
  }
  int zmin = 0;
  int zmax = dims_.z - 1;
  if (z_layers) {
    zmin = std::max(zmin, z_layers->first);
    zmax = std::min(zmax, z_layers->second);
  }
  if (zmin > zmax) {
    throw PlanningError(PlanningError::Code::NoFeasibleGoal, "empty candidate layer range");
  }

  double best_d2 = std::numeric_limits<double>::infinity();
  std::optional<Index3> best;
  auto consider = [&](const Index3& i) {
    if (i.z < zmin || i.z > zmax || !in_bounds(i)) return;
    const VoxelState st = state(i);
    if (st == VoxelState::Occupied) return;
    if (st == VoxelState::Unknown && mode == GoalCandidates::FreeOrFrontier && !is_frontier(i)) {
      return;
    }
    const double d2 = (voxel_center(i) - q).squaredNorm();
    // Ties resolve to the first visited voxel; shells are visited in a fixed order.
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  };

  const int max_shell = std::max({dims_.x, dims_.y, dims_.z});
  for (int k = 0; k <= max_shell; ++k) {
    // Every voxel in shell k is at least (k - 0.5) voxels from q along one axis.
    if (best && (k - 0.5) * voxel_size_ > std::sqrt(best_d2)) break;
    for (int dx = -k; dx <= k; ++dx) {
      const int x = qi.x + dx;
      if (x < 0 || x >= dims_.x) continue;
      for (int dy = -k; dy <= k; ++dy) {
        const int y = qi.y + dy;
        if (y < 0 || y >= dims_.y) continue;
        if (std::abs(dx) == k || std::abs(dy) == k) {
          const int z_lo = std::max(qi.z - k, zmin);
          const int z_hi = std::min(qi.z + k, zmax);
          for (int z = z_lo; z <= z_hi; ++z) consider({x, y, z});
        } else {
          consider({x, y, qi.z - k});
          if (k > 0) consider({x, y, qi.z + k});
        }
      }
    }
  }
  if (!best) {
    throw PlanningError(PlanningError::Code::NoFeasibleGoal,
                        "no goal candidate voxel in the map window");
  }
  return voxel_center(*best);
}

}  // namespace mfp::map
