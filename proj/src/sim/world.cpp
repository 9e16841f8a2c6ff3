#include "mfp/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace mfp::sim {

double box_distance(const BoxShape& b, const Vec3& p) {
  const Vec3 d = (p - b.center).cwiseAbs() - 0.5 * b.size;
  return d.cwiseMax(0.0).norm();
}

double cylinder_distance(const CylinderShape& c, const Vec3& p) {
  const double rho = std::hypot(p.x() - c.cx, p.y() - c.cy);
  const double dr = std::max(0.0, rho - c.radius);
  const double dz = std::max({0.0, c.z_min - p.z(), p.z() - c.z_max});
  return std::hypot(dr, dz);
}

std::optional<double> ray_box(const BoxShape& b, const Vec3& o, const Vec3& d, double max_t) {
  double t0 = 0.0;
  double t1 = max_t;
  for (int k = 0; k < 3; ++k) {
    const double lo = b.center[k] - 0.5 * b.size[k];
    const double hi = b.center[k] + 0.5 * b.size[k];
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] < lo || o[k] > hi) return std::nullopt;
      continue;
    }
    double ta = (lo - o[k]) / d[k];
    double tb = (hi - o[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

std::optional<double> ray_cylinder(const CylinderShape& c, const Vec3& o, const Vec3& d,
                                   double max_t) {
  // Interval of t inside the slab z in [z_min, z_max].
  double z0 = 0.0;
  double z1 = max_t;
  if (std::abs(d.z()) < 1e-15) {
    if (o.z() < c.z_min || o.z() > c.z_max) return std::nullopt;
  } else {
    double ta = (c.z_min - o.z()) / d.z();
    double tb = (c.z_max - o.z()) / d.z();
    if (ta > tb) std::swap(ta, tb);
    z0 = std::max(z0, ta);
    z1 = std::min(z1, tb);
    if (z0 > z1) return std::nullopt;
  }
  // Interval inside the infinite cylinder.
  const double ox = o.x() - c.cx;
  const double oy = o.y() - c.cy;
  const double a = d.x() * d.x() + d.y() * d.y();
  const double cc = ox * ox + oy * oy - c.radius * c.radius;
  double r0 = 0.0;
  double r1 = max_t;
  if (a < 1e-15) {
    if (cc > 0.0) return std::nullopt;
  } else {
    const double bh = ox * d.x() + oy * d.y();
    const double disc = bh * bh - a * cc;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Stable roots of a t^2 + 2 bh t + cc.
    const double q = -(bh + std::copysign(sq, bh));
    double ta = q / a;
    double tb = (q != 0.0) ? cc / q : ta;
    if (ta > tb) std::swap(ta, tb);
    r0 = std::max(r0, ta);
    r1 = std::min(r1, tb);
  }
  const double t0 = std::max(z0, r0);
  const double t1 = std::min(z1, r1);
  if (t0 > t1) return std::nullopt;
  return t0;
}

double World::distance(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes) best = std::min(best, box_distance(b, p));
  for (const auto& c : cylinders) best = std::min(best, cylinder_distance(c, p));
  return best;
}

std::optional<double> World::raycast(const Vec3& origin, const Vec3& dir, double max_t) const {
  std::optional<double> best;
  double lim = max_t;
  for (const auto& b : boxes) {
    if (auto t = ray_box(b, origin, dir, lim)) {
      best = *t;
      lim = *t;
    }
  }
  for (const auto& c : cylinders) {
    if (auto t = ray_cylinder(c, origin, dir, lim)) {
      best = *t;
      lim = *t;
    }
  }
  return best;
}

World World::subset_near(const Vec3& p, double radius) const {
  World w;
  w.name = name;
  w.seed = seed;
  w.bounds_min = bounds_min;
  w.bounds_max = bounds_max;
  w.start = start;
  w.goal = goal;
  w.rooms = rooms;
  for (const auto& b : boxes) {
    const double dx = std::max(0.0, std::abs(p.x() - b.center.x()) - 0.5 * b.size.x());
    const double dy = std::max(0.0, std::abs(p.y() - b.center.y()) - 0.5 * b.size.y());
    if (std::hypot(dx, dy) <= radius) w.boxes.push_back(b);
  }
  for (const auto& c : cylinders) {
    if (std::hypot(p.x() - c.cx, p.y() - c.cy) - c.radius <= radius) w.cylinders.push_back(c);
  }
  return w;
}

World gen_forest(std::uint64_t seed, const ForestOptions& opts) {
  if (opts.side <= 0.0 || opts.density < 0.0 || opts.radius_min <= 0.0 ||
      opts.radius_max < opts.radius_min) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "gen_forest: bad options");
  }
  World w;
  w.name = "forest";
  w.seed = seed;
  const double margin = 5.0;
  w.bounds_min = Vec3(-margin, -margin, 0.0);
  w.bounds_max = Vec3(opts.side + margin, opts.side + margin, opts.height);
  w.start = Vec3(0.0, 0.5 * opts.side, opts.flight_z);
  w.goal = Vec3(opts.side, 0.5 * opts.side, opts.flight_z);

  const auto count = static_cast<std::size_t>(std::llround(opts.density * opts.side * opts.side));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, opts.side);
  std::uniform_real_distribution<double> rad(opts.radius_min, opts.radius_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t placed = 0;
  while (placed < count) {
    const double x = pos(rng);
    const double y = pos(rng);
    const double r = rad(rng);
    const bool is_box = unit(rng) < opts.box_fraction;
    // Footprint reach used for the clear discs (box half-diagonal).
    const double reach = is_box ? r * std::sqrt(2.0) : r;
    const double ds = std::hypot(x - w.start.x(), y - w.start.y());
    const double dg = std::hypot(x - w.goal.x(), y - w.goal.y());
    if (ds - reach < opts.clear_radius || dg - reach < opts.clear_radius) continue;
    if (is_box) {
      w.boxes.push_back({Vec3(x, y, 0.5 * opts.height), Vec3(2 * r, 2 * r, opts.height)});
    } else {
      w.cylinders.push_back({x, y, r, 0.0, opts.height});
    }
    ++placed;
  }
  return w;
}

void add_walls(World& w, const std::vector<WallSpec>& walls, double wall, double height) {
  for (const auto& s : walls) {
    const double x0 = std::min(s.x0, s.x1) - 0.5 * wall;
    const double x1 = std::max(s.x0, s.x1) + 0.5 * wall;
    const double y0 = std::min(s.y0, s.y1) - 0.5 * wall;
    const double y1 = std::max(s.y0, s.y1) + 0.5 * wall;
    w.boxes.push_back({Vec3(0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.5 * height),
                       Vec3(x1 - x0, y1 - y0, height)});
  }
}

World gen_bugtrap(const BugtrapOptions& opts) {
  if (opts.inner_size <= 0.0 || opts.wall <= 0.0 || opts.opening_width < 0.0) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "gen_bugtrap: bad options");
  }
  World w;
  w.name = "bugtrap";
  const Vec3 c = opts.center;
  const double h = 0.5 * opts.inner_size + 0.5 * opts.wall;  // wall centre-line offset
  w.start = Vec3(c.x(), c.y(), opts.flight_z);
  w.goal = Vec3(c.x() + opts.goal_distance, c.y(), opts.flight_z);
  w.bounds_min = Vec3(c.x() - h - 10.0, c.y() - h - 10.0, 0.0);
  w.bounds_max = Vec3(w.goal.x() + 5.0, c.y() + h + 10.0, opts.height);

  std::vector<WallSpec> walls;
  walls.push_back({c.x() + h, c.y() - h, c.x() + h, c.y() + h});  // back, faces the goal
  walls.push_back({c.x() - h, c.y() - h, c.x() + h, c.y() - h});
  walls.push_back({c.x() - h, c.y() + h, c.x() + h, c.y() + h});
  const double half_open = 0.5 * opts.opening_width;
  const double inner = h - 0.5 * opts.wall;
  if (half_open < inner) {
    walls.push_back({c.x() - h, c.y() - h, c.x() - h, c.y() - half_open - 0.5 * opts.wall});
    walls.push_back({c.x() - h, c.y() + half_open + 0.5 * opts.wall, c.x() - h, c.y() + h});
  }
  add_walls(w, walls, opts.wall, opts.height);
  w.rooms.push_back({c.x() - inner, c.y() - inner, c.x() + inner, c.y() + inner});
  return w;
}

World gen_office(const OfficeOptions& opts) {
  World w;
  w.name = "office";
  w.start = Vec3(0.5, 1.5, opts.flight_z);
  w.goal = Vec3(6.0, 9.5, opts.flight_z);
  w.bounds_min = Vec3(-2.0, -1.0, 0.0);
  w.bounds_max = Vec3(21.0, 14.0, opts.height);

  // Corridor y in [0, 3] along x; two rooms above it open to the corridor only
  // through short vestibules, then a sealed block; a passage at the east end
  // leads to the hall y in [6, 13].
  const std::vector<WallSpec> walls = {
      {-1, 0, 20, 0},       // corridor south
      {-1, 0, -1, 13},      // west
      {20, 0, 20, 13},      // east
      {-1, 13, 20, 13},     // hall north
      {-1, 3, 3.6, 3},      // corridor north, up to the room 1 door
      {5.4, 3, 8.6, 3},     // between the doors
      {10.4, 3, 15, 3},     // up to the passage
      {-1, 6, 15, 6},       // room backs / hall south
      {2, 3, 2, 6},         // room 1 west
      {7, 3, 7, 6},         // room 1 | room 2
      {12, 3, 12, 6},       // room 2 east
      {15, 3, 15, 6},       // passage west
      {3.6, 3, 3.6, 4.2},   // room 1 vestibule
      {5.4, 3, 5.4, 4.2},
      {8.6, 3, 8.6, 4.2},   // room 2 vestibule
      {10.4, 3, 10.4, 4.2},
  };
  add_walls(w, walls, opts.wall, opts.height);
  // Room interiors past the vestibules; a heading reversal counts only there.
  w.rooms.push_back({2.0, 4.2, 7.0, 6.0});
  w.rooms.push_back({7.0, 4.2, 12.0, 6.0});
  return w;
}

void write_world(std::ostream& os, const World& w) {
  os << std::setprecision(17);
  os << "# world file\n";
  os << "name " << w.name << "\n";
  os << "seed " << w.seed << "\n";
  os << "bounds " << w.bounds_min.x() << ' ' << w.bounds_min.y() << ' ' << w.bounds_min.z() << ' '
     << w.bounds_max.x() << ' ' << w.bounds_max.y() << ' ' << w.bounds_max.z() << "\n";
  os << "start " << w.start.x() << ' ' << w.start.y() << ' ' << w.start.z() << "\n";
  os << "goal " << w.goal.x() << ' ' << w.goal.y() << ' ' << w.goal.z() << "\n";
  for (const auto& b : w.boxes) {
    os << "box " << b.center.x() << ' ' << b.center.y() << ' ' << b.center.z() << ' '
       << b.size.x() << ' ' << b.size.y() << ' ' << b.size.z() << "\n";
  }
  for (const auto& c : w.cylinders) {
    os << "cylinder " << c.cx << ' ' << c.cy << ' ' << c.radius << ' ' << c.z_min << ' '
       << c.z_max << "\n";
  }
  for (const auto& r : w.rooms) {
    os << "room " << r.x0 << ' ' << r.y0 << ' ' << r.x1 << ' ' << r.y1 << "\n";
  }
}

namespace {

[[noreturn]] void world_error(int line, const std::string& msg) {
  throw PlanningError(PlanningError::Code::InvalidArgument,
                      "world line " + std::to_string(line) + ": " + msg);
}

template <std::size_t N>
std::array<double, N> read_numbers(std::istringstream& ss, int line, const std::string& kind) {
  std::array<double, N> v{};
  for (auto& x : v) {
    if (!(ss >> x)) world_error(line, "expected " + std::to_string(N) + " numbers for " + kind);
  }
  std::string extra;
  if (ss >> extra) world_error(line, "trailing token '" + extra + "'");
  return v;
}

}  // namespace

World read_world(std::istream& is) {
  World w;
  w.name = "file";
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream ss(raw);
    std::string kind;
    if (!(ss >> kind)) continue;
    if (kind == "name") {
      if (!(ss >> w.name)) world_error(line, "missing name");
    } else if (kind == "seed") {
      if (!(ss >> w.seed)) world_error(line, "missing seed");
    } else if (kind == "bounds") {
      auto v = read_numbers<6>(ss, line, kind);
      w.bounds_min = Vec3(v[0], v[1], v[2]);
      w.bounds_max = Vec3(v[3], v[4], v[5]);
    } else if (kind == "start" || kind == "goal") {
      auto v = read_numbers<3>(ss, line, kind);
      (kind == "start" ? w.start : w.goal) = Vec3(v[0], v[1], v[2]);
    } else if (kind == "box") {
      auto v = read_numbers<6>(ss, line, kind);
      if (v[3] <= 0 || v[4] <= 0 || v[5] <= 0) world_error(line, "box sizes must be positive");
      w.boxes.push_back({Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
    } else if (kind == "cylinder") {
      auto v = read_numbers<5>(ss, line, kind);
      if (v[2] <= 0 || v[4] < v[3]) world_error(line, "bad cylinder dimensions");
      w.cylinders.push_back({v[0], v[1], v[2], v[3], v[4]});
    } else if (kind == "room") {
      auto v = read_numbers<4>(ss, line, kind);
      w.rooms.push_back({v[0], v[1], v[2], v[3]});
    } else {
      world_error(line, "unknown entry '" + kind + "'");
    }
  }
  return w;
}

void save_world(const std::string& path, const World& w) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_world(os, w);
}

World load_world(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "cannot open world file " + path);
  }
  return read_world(is);
}

}  // namespace mfp::sim
