#pragma once

#include "mfp/search/occupancy_mask.hpp"
#include "mfp/types.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace mfp::search {

/// Piecewise-linear path through voxel centres (q1 = start, qn = goal).
struct GridPath {
  std::vector<Vec3> waypoints;

  std::size_t size() const { return waypoints.size(); }
  bool empty() const { return waypoints.empty(); }
  double length() const;
  /// Arc length from q1 to waypoint i.
  double arc_length_to(std::size_t i) const;
};

/// A point on a path together with the index of the waypoint right after it.
struct PathPoint {
  Vec3 point;
  std::size_t next_index = 0;
  /// True when the path never reaches the sphere; point is then qn.
  bool inside = false;
};

/// First point (by arc length) at distance r from `center`. next_index is the
/// first waypoint beyond that point (q_r). Inside -> {qn, n-1, true}.
PathPoint first_sphere_intersection(const GridPath& path, const Vec3& center, double r);

/// Last point (by arc length) at distance r from `center`; next_index is the
/// first waypoint after it (q_s). Inside -> {qn, n-1, true}.
PathPoint last_sphere_intersection(const GridPath& path, const Vec3& center, double r);

/// Waypoints q_r .. q_{s-1} (0-based half-open slice [r_idx, s_idx)).
std::vector<Vec3> intermediate_waypoints(const GridPath& path, std::size_t r_idx,
                                         std::size_t s_idx);

/// Location of a point on a path: segment i (q_i -> q_{i+1}) and parameter t.
struct PathParam {
  std::size_t segment = 0;
  double t = 0.0;
};

/// First entry into and last exit from a blocked in-bounds voxel (voxels
/// outside the mask do not count). nullopt when no such crossing exists.
std::optional<std::pair<PathParam, PathParam>> path_blocked_span(const GridPath& path,
                                                                 const OccupancyMask& mask);

/// Point at a path parameter.
Vec3 point_at(const GridPath& path, const PathParam& p);

/// Entry point of the first blocked-voxel crossing and exit point of the last
/// one along the path. nullopt when the path touches no blocked voxel.
std::optional<std::pair<Vec3, Vec3>> path_first_last_blocked(const GridPath& path,
                                                              const OccupancyMask& mask);

/// One voxel crossed by a segment, with the entry/exit segment parameters.
struct SegmentVoxel {
  Index3 index;
  double t_enter = 0.0;
  double t_exit = 0.0;
};

/// Voxels crossed by a -> b in order (Amanatides-Woo traversal over the mask
/// lattice). Voxels crossed over zero length (corner/edge grazes) are skipped.
std::vector<SegmentVoxel> traverse_segment(const OccupancyMask& mask, const Vec3& a,
                                           const Vec3& b);

}  // namespace mfp::search
