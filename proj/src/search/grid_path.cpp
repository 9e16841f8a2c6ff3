#include "mfp/search/grid_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfp::search {

double GridPath::length() const { return arc_length_to(waypoints.empty() ? 0 : size() - 1); }

double GridPath::arc_length_to(std::size_t i) const {
  double len = 0.0;
  for (std::size_t k = 1; k <= i && k < waypoints.size(); ++k) {
    len += (waypoints[k] - waypoints[k - 1]).norm();
  }
  return len;
}

namespace {

// Roots t in [0,1] of |a + t(b-a) - c|^2 = r^2, ascending.
std::vector<double> segment_sphere_roots(const Vec3& a, const Vec3& b, const Vec3& c,
                                         double r) {
  const Vec3 d = b - a;
  const Vec3 f = a - c;
  const double qa = d.squaredNorm();
  const double qb = 2.0 * f.dot(d);
  const double qc = f.squaredNorm() - r * r;
  std::vector<double> out;
  if (qa <= 0.0) return out;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return out;
  const double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
  double t0 = q / qa;
  double t1 = q != 0.0 ? qc / q : t0;
  if (t0 > t1) std::swap(t0, t1);
  for (double t : {t0, t1}) {
    if (t >= 0.0 && t <= 1.0) out.push_back(t);
  }
  if (out.size() == 2 && out[0] == out[1]) out.pop_back();
  return out;
}

PathPoint inside_result(const GridPath& path) {
  return PathPoint{path.waypoints.back(), path.size() - 1, true};
}

}  // namespace

PathPoint first_sphere_intersection(const GridPath& path, const Vec3& center, double r) {
  if (path.empty()) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "empty path");
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto roots = segment_sphere_roots(path.waypoints[i], path.waypoints[i + 1], center, r);
    if (!roots.empty()) {
      const double t = roots.front();
      return {path.waypoints[i] + t * (path.waypoints[i + 1] - path.waypoints[i]), i + 1,
              false};
    }
  }
  return inside_result(path);
}

PathPoint last_sphere_intersection(const GridPath& path, const Vec3& center, double r) {
  if (path.empty()) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "empty path");
  }
  for (std::size_t i = path.size() - 1; i-- > 0;) {
    auto roots = segment_sphere_roots(path.waypoints[i], path.waypoints[i + 1], center, r);
    if (!roots.empty()) {
      const double t = roots.back();
      return {path.waypoints[i] + t * (path.waypoints[i + 1] - path.waypoints[i]), i + 1,
              false};
    }
  }
  return inside_result(path);
}

std::vector<Vec3> intermediate_waypoints(const GridPath& path, std::size_t r_idx,
                                         std::size_t s_idx) {
  s_idx = std::min(s_idx, path.size());
  if (r_idx >= s_idx) return {};
  return {path.waypoints.begin() + static_cast<std::ptrdiff_t>(r_idx),
          path.waypoints.begin() + static_cast<std::ptrdiff_t>(s_idx)};
}

std::vector<SegmentVoxel> traverse_segment(const OccupancyMask& mask, const Vec3& a,
                                           const Vec3& b) {
  std::vector<SegmentVoxel> out;
  const double s = mask.voxel_size();
  const Index3 lo = mask.lattice_origin();
  const Vec3 d = b - a;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Global lattice cell of a, with the same snapping as the map.
  Index3 cell;
  int step[3];
  double t_max[3];
  double t_delta[3];
  for (int ax = 0; ax < 3; ++ax) {
    cell[ax] = static_cast<int>(std::floor(a[ax] / s + 1e-9));
    if (d[ax] > 0.0) {
      step[ax] = 1;
      t_max[ax] = ((cell[ax] + 1) * s - a[ax]) / d[ax];
      t_delta[ax] = s / d[ax];
    } else if (d[ax] < 0.0) {
      step[ax] = -1;
      t_max[ax] = (cell[ax] * s - a[ax]) / d[ax];
      t_delta[ax] = -s / d[ax];
    } else {
      step[ax] = 0;
      t_max[ax] = kInf;
      t_delta[ax] = kInf;
    }
  }

  double t = 0.0;
  for (;;) {
    const double t_next = std::min({t_max[0], t_max[1], t_max[2], 1.0});
    if (t_next - t > 1e-9 || (t == 0.0 && t_next >= 1.0)) {
      out.push_back({cell - lo, t, t_next});
    }
    if (t_next >= 1.0) break;
    t = t_next;
    for (int ax = 0; ax < 3; ++ax) {
      if (t_max[ax] <= t_next) {
        cell[ax] += step[ax];
        t_max[ax] += t_delta[ax];
      }
    }
  }
  return out;
}

std::optional<std::pair<PathParam, PathParam>> path_blocked_span(const GridPath& path,
                                                                 const OccupancyMask& mask) {
  std::optional<PathParam> first;
  std::optional<PathParam> last;
  if (path.size() == 1) {
    auto i = mask.world_to_index(path.waypoints[0]);
    if (i && mask.blocked(*i)) return std::make_pair(PathParam{0, 0.0}, PathParam{0, 0.0});
    return std::nullopt;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    for (const SegmentVoxel& v : traverse_segment(mask, path.waypoints[i], path.waypoints[i + 1])) {
      if (!mask.in_bounds(v.index) || !mask.blocked(v.index)) continue;
      if (!first) first = PathParam{i, v.t_enter};
      last = PathParam{i, v.t_exit};
    }
  }
  if (!first) return std::nullopt;
  return std::make_pair(*first, *last);
}

Vec3 point_at(const GridPath& path, const PathParam& p) {
  if (p.segment + 1 >= path.size()) return path.waypoints.at(p.segment);
  const Vec3& a = path.waypoints[p.segment];
  return a + p.t * (path.waypoints[p.segment + 1] - a);
}

std::optional<std::pair<Vec3, Vec3>> path_first_last_blocked(const GridPath& path,
                                                              const OccupancyMask& mask) {
  auto span = path_blocked_span(path, mask);
  if (!span) return std::nullopt;
  return std::make_pair(point_at(path, span->first), point_at(path, span->second));
}

}  // namespace mfp::search
