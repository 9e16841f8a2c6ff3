#pragma once

#include "mfp/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mfp::sim {

/// Axis-aligned box given by centre and full side lengths.
struct BoxShape {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
};

/// Vertical cylinder over [z_min, z_max].
struct CylinderShape {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.5;
  double z_min = 0.0;
  double z_max = 4.0;
};

/// Axis-aligned xy rectangle (used to tag office rooms).
struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

struct World {
  std::string name = "empty";
  std::uint64_t seed = 0;
  Vec3 bounds_min = Vec3(-10, -10, 0);
  Vec3 bounds_max = Vec3(10, 10, 4);
  Vec3 start = Vec3(0, 0, 1.5);
  Vec3 goal = Vec3(10, 0, 1.5);
  std::vector<BoxShape> boxes;
  std::vector<CylinderShape> cylinders;
  std::vector<Rect> rooms;

  std::size_t obstacle_count() const { return boxes.size() + cylinders.size(); }
  /// Distance from p to the nearest obstacle surface (0 inside).
  double distance(const Vec3& p) const;
  /// Nearest hit parameter t in (0, max_t] along origin + t*dir (dir unit), if any.
  std::optional<double> raycast(const Vec3& origin, const Vec3& dir, double max_t) const;
  /// Copy holding only obstacles whose xy footprint comes within `radius` of p.
  World subset_near(const Vec3& p, double radius) const;
};

double box_distance(const BoxShape& b, const Vec3& p);
double cylinder_distance(const CylinderShape& c, const Vec3& p);
std::optional<double> ray_box(const BoxShape& b, const Vec3& o, const Vec3& d, double max_t);
std::optional<double> ray_cylinder(const CylinderShape& c, const Vec3& o, const Vec3& d,
                                   double max_t);

struct ForestOptions {
  double side = 50.0;
  double density = 0.1;  // obstacles per m^2
  double radius_min = 0.2;
  double radius_max = 0.5;
  double height = 4.0;
  double box_fraction = 0.3;
  double clear_radius = 2.0;
  double flight_z = 1.5;
};

/// Forest on [0, side]^2 with start/goal at the midpoints of the x = 0 and
/// x = side edges.
World gen_forest(std::uint64_t seed, const ForestOptions& opts = {});

struct BugtrapOptions {
  Vec3 center = Vec3(0, 0, 0);
  double inner_size = 6.0;
  double wall = 0.3;
  double height = 4.0;
  double opening_width = 2.4;
  double goal_distance = 35.0;
  double flight_z = 1.5;
};

/// C-shaped enclosure around the start, open on the side facing away from the goal.
World gen_bugtrap(const BugtrapOptions& opts = {});

/// Wall segment of an office layout, axis-aligned in xy, full height.
struct WallSpec {
  double x0, y0, x1, y1;
};

struct OfficeOptions {
  double wall = 0.2;
  double height = 3.0;
  double flight_z = 1.5;
};

/// Corridor with dead-end rooms between start and goal, plus a detour to the goal.
World gen_office(const OfficeOptions& opts = {});
/// Builds walls from a declarative list (thickness `wall`, height `height`).
void add_walls(World& w, const std::vector<WallSpec>& walls, double wall, double height);

/// Structured text world files ("type value..." per line, '#' comments).
void write_world(std::ostream& os, const World& w);
World read_world(std::istream& is);
void save_world(const std::string& path, const World& w);
World load_world(const std::string& path);

}  // namespace mfp::sim
