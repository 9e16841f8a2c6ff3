#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "grid_oracles.hpp"
#include "mfp/sim/oracle.hpp"
#include "mfp/sim/sensor.hpp"
#include "mfp/sim/world.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace mfp;
using namespace mfp::sim;

namespace {

/// First contact along o + t d found by 1 mm marching; also reports the
/// closest approach so grazing rays can be told apart.
struct March {
  std::optional<double> t;
  double closest = 1e9;
};

March march(const World& w, const Vec3& o, const Vec3& d, double max_t) {
  March m;
  const double step = 1e-3;
  for (double t = step; t <= max_t; t += step) {
    const double dist = w.distance(o + t * d);
    m.closest = std::min(m.closest, dist);
    if (dist <= 0.0) {
      m.t = t;
      return m;
    }
  }
  return m;
}

World small_world() {
  World w;
  w.bounds_min = Vec3(-2, -6, 0);
  w.bounds_max = Vec3(12, 6, 4);
  w.boxes.push_back({Vec3(5, 1, 2), Vec3(1, 2, 4)});
  w.boxes.push_back({Vec3(7, -2, 1), Vec3(0.6, 0.6, 2)});
  w.cylinders.push_back({4, -1.5, 0.4, 0, 4});
  w.cylinders.push_back({8, 2.5, 0.3, 0, 1.2});
  w.cylinders.push_back({9.5, 0, 0.5, 0, 4});
  return w;
}

}  // namespace

TEST_CASE("box and cylinder distance match brute-force surface sampling") {
  const BoxShape b{Vec3(1, 2, 3), Vec3(2, 1, 4)};
  const CylinderShape c{-1, 0.5, 0.7, 0.5, 3.0};
  // Dense samples of each surface.
  std::vector<Vec3> bs, cs;
  const int n = 40;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
      const Vec3 lo = b.center - 0.5 * b.size, sz = b.size;
      for (int f = 0; f < 2; ++f) {
        bs.emplace_back(lo.x() + f * sz.x(), lo.y() + u * sz.y(), lo.z() + v * sz.z());
        bs.emplace_back(lo.x() + u * sz.x(), lo.y() + f * sz.y(), lo.z() + v * sz.z());
        bs.emplace_back(lo.x() + u * sz.x(), lo.y() + v * sz.y(), lo.z() + f * sz.z());
      }
      const double th = 2 * M_PI * u;
      cs.emplace_back(c.cx + c.radius * std::cos(th), c.cy + c.radius * std::sin(th),
                      c.z_min + v * (c.z_max - c.z_min));
      for (double z : {c.z_min, c.z_max})
        cs.emplace_back(c.cx + v * c.radius * std::cos(th), c.cy + v * c.radius * std::sin(th), z);
    }
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-4, 6);
  for (int k = 0; k < 200; ++k) {
    const Vec3 p(u(rng), u(rng), u(rng));
    auto brute = [&](const std::vector<Vec3>& s) {
      double best = 1e9;
      for (const auto& q : s) best = std::min(best, (q - p).norm());
      return best;
    };
    const double db = box_distance(b, p);
    const double dc = cylinder_distance(c, p);
    const bool in_b = ((p - b.center).cwiseAbs().array() < 0.5 * b.size.array()).all();
    const bool in_c = std::hypot(p.x() - c.cx, p.y() - c.cy) < c.radius && p.z() > c.z_min &&
                      p.z() < c.z_max;
    if (in_b) CHECK(db == doctest::Approx(0.0));
    else CHECK(std::abs(db - brute(bs)) < 0.1);
    CHECK(db <= brute(bs) + 1e-9);
    if (in_c) CHECK(dc == doctest::Approx(0.0));
    else CHECK(std::abs(dc - brute(cs)) < 0.1);
    CHECK(dc <= brute(cs) + 1e-9);
  }
}

TEST_CASE("raycast agrees with 1 mm ray marching") {
  const World w = small_world();
  const Vec3 o(0, 0, 1.5);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ang(-0.9, 0.9), el(-0.4, 0.4);
  int hits = 0;
  for (int k = 0; k < 150; ++k) {
    const double a = ang(rng), e = el(rng);
    const Vec3 d(std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e));
    const auto t = w.raycast(o, d, 10.0);
    const March m = march(w, o, d, 10.0);
    if (t.has_value() != m.t.has_value()) {
      CHECK(m.closest < 2e-3);
      continue;
    }
    if (t) {
      ++hits;
      CHECK(std::abs(*t - *m.t) <= 1e-3 + 1e-9);
    }
  }
  CHECK(hits > 20);
}

TEST_CASE("render_depth matches per-ray marching") {
  const World w = small_world();
  SensorConfig cfg;
  cfg.h_rays = 16;
  cfg.v_rays = 9;
  const Vec3 o(0.5, 0.2, 1.5);
  const double yaw = 0.1;
  const auto scan = render_depth(w, o, yaw, cfg);
  CHECK(scan.points.size() + scan.max_range_dirs.size() == 16u * 9u);
  std::size_t ip = 0, im = 0;
  for (int j = 0; j < cfg.v_rays; ++j)
    for (int i = 0; i < cfg.h_rays; ++i) {
      const Vec3 b = ray_direction(cfg, i, j);
      const Vec3 d(std::cos(yaw) * b.x() - std::sin(yaw) * b.y(),
                   std::sin(yaw) * b.x() + std::cos(yaw) * b.y(), b.z());
      const March m = march(w, o, d, cfg.max_range);
      if (m.t) {
        REQUIRE(ip < scan.points.size());
        CHECK(std::abs((scan.points[ip] - o).norm() - *m.t) <= 1e-3 + 1e-9);
        ++ip;
      } else {
        REQUIRE(im < scan.max_range_dirs.size());
        CHECK((scan.max_range_dirs[im] - d).norm() < 1e-12);
        ++im;
      }
    }
}

TEST_CASE("render_depth on an empty world and a wall") {
  SensorConfig cfg;
  World empty;
  const auto s0 = render_depth(empty, Vec3(0, 0, 1.5), 0.7, cfg);
  CHECK(s0.points.empty());
  CHECK(s0.max_range_dirs.size() == 160u * 90u);

  World wall;
  wall.boxes.push_back({Vec3(5.5, 0, 2), Vec3(1, 40, 40)});
  const auto s1 = render_depth(wall, Vec3(0, 0, 1.5), 0.0, cfg);
  CHECK(s1.max_range_dirs.empty());
  CHECK(s1.points.size() == 160u * 90u);
  for (const auto& p : s1.points) CHECK(p.x() == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("ray_direction spans the field of view symmetrically") {
  SensorConfig cfg;
  const Vec3 l = ray_direction(cfg, 0, 45);
  const Vec3 r = ray_direction(cfg, 159, 45);
  CHECK(l.y() == doctest::Approx(-r.y()));
  const double h_edge = std::atan2(r.y(), r.x());
  CHECK(h_edge == doctest::Approx(0.5 * cfg.hfov - 0.5 * cfg.hfov / cfg.h_rays));
  for (int i = 0; i < 160; i += 13)
    for (int j = 0; j < 90; j += 11) CHECK(ray_direction(cfg, i, j).norm() == doctest::Approx(1.0));
}

TEST_CASE("gen_forest") {
  ForestOptions opts;
  const World a = gen_forest(7, opts);
  CHECK(a.obstacle_count() == 250u);
  const World b = gen_forest(7, opts);
  REQUIRE(a.cylinders.size() == b.cylinders.size());
  for (std::size_t i = 0; i < a.cylinders.size(); ++i) {
    CHECK(a.cylinders[i].cx == b.cylinders[i].cx);
    CHECK(a.cylinders[i].radius == b.cylinders[i].radius);
  }
  CHECK(a.boxes.size() == b.boxes.size());
  CHECK(a.distance(a.start) >= opts.clear_radius - 1e-9);
  CHECK(a.distance(a.goal) >= opts.clear_radius - 1e-9);
  const double frac = static_cast<double>(a.boxes.size()) / a.obstacle_count();
  CHECK(frac > 0.2);
  CHECK(frac < 0.4);

  ForestOptions none = opts;
  none.density = 0.0;
  CHECK(gen_forest(7, none).obstacle_count() == 0u);
  CHECK(gen_forest(8, opts).cylinders[0].cx != a.cylinders[0].cx);
}

TEST_CASE("bugtrap geometry and oracle") {
  const World w = gen_bugtrap();
  // Straight segment start -> goal crosses the trap.
  bool crosses = false;
  for (double u = 0; u <= 1.0; u += 1e-3)
    if (w.distance(w.start + u * (w.goal - w.start)) <= 0.0) crosses = true;
  CHECK(crosses);

  OracleOptions oo;
  const auto len = oracle_shortest_path(w, oo, w.start, w.goal);
  REQUIRE(len.has_value());
  CHECK(*len > (w.goal - w.start).norm() + 1.0);

  // Closing the opening disconnects start from goal, so the path uses it.
  World closed = w;
  BugtrapOptions bo;
  const double x_face = bo.center.x() - 0.5 * bo.inner_size - 0.5 * bo.wall;
  closed.boxes.push_back({Vec3(x_face, bo.center.y(), 0.5 * bo.height),
                          Vec3(bo.wall, bo.opening_width + 2 * bo.wall, bo.height)});
  CHECK_FALSE(oracle_shortest_path(closed, oo, closed.start, closed.goal).has_value());

  BugtrapOptions wide;
  wide.opening_width = wide.inner_size + 1.0;
  const World pair = gen_bugtrap(wide);
  CHECK(pair.boxes.size() == 3u);
  CHECK(w.boxes.size() == 5u);
  CHECK(oracle_shortest_path(pair, oo, pair.start, pair.goal).has_value());
}

TEST_CASE("office layout") {
  const World w = gen_office();
  REQUIRE(w.rooms.size() >= 2u);
  OracleOptions oo;
  const double s = oo.voxel, r = oo.inflation;
  // Each room interior is entered through an opening at least 2r + 2s wide.
  for (const auto& room : w.rooms) {
    double best = 0.0;
    for (double x = room.x0; x <= room.x1; x += 0.05)
      best = std::max(best, w.distance(Vec3(x, room.y0, 1.5)));
    CHECK(2.0 * best >= 2.0 * r + 2.0 * s);
  }
  // Straight segment start -> goal crosses a room.
  bool through_room = false;
  for (double u = 0; u <= 1.0; u += 1e-3) {
    const Vec3 p = w.start + u * (w.goal - w.start);
    for (const auto& room : w.rooms) through_room |= room.contains(p.x(), p.y());
  }
  CHECK(through_room);
  const auto len = oracle_shortest_path(w, oo, w.start, w.goal);
  REQUIRE(len.has_value());
  CHECK(*len > (w.goal - w.start).norm() + 5.0);
}

TEST_CASE("world files round-trip") {
  World w = gen_office();
  w.cylinders.push_back({1.25, -3.5, 0.3, 0.0, 2.5});
  w.seed = 42;
  std::stringstream ss;
  write_world(ss, w);
  const World r = read_world(ss);
  CHECK(r.name == w.name);
  CHECK(r.seed == w.seed);
  CHECK(r.start == w.start);
  CHECK(r.goal == w.goal);
  CHECK(r.bounds_min == w.bounds_min);
  CHECK(r.bounds_max == w.bounds_max);
  REQUIRE(r.boxes.size() == w.boxes.size());
  for (std::size_t i = 0; i < w.boxes.size(); ++i) {
    CHECK(r.boxes[i].center == w.boxes[i].center);
    CHECK(r.boxes[i].size == w.boxes[i].size);
  }
  REQUIRE(r.cylinders.size() == 1u);
  CHECK(r.cylinders[0].cx == 1.25);
  CHECK(r.rooms.size() == w.rooms.size());

  std::stringstream bad("name x\nbox 1 2\n");
  try {
    (void)read_world(bad);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("oracle: A* equals Dijkstra and an independent search") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.5, 5.5), rad(0.2, 0.6);
  OracleOptions oo;
  for (int trial = 0; trial < 8; ++trial) {
    World w;
    w.bounds_min = Vec3(0, 0, 0);
    w.bounds_max = Vec3(6, 6, 3);
    for (int k = 0; k < 8; ++k) w.cylinders.push_back({u(rng), u(rng), rad(rng), 0, 3});
    const OracleGrid g = rasterize(w, oo);
    const Vec3 a(0.25, 0.25 + trial * 0.5, 1.5), b(5.75, 5.75 - trial * 0.3, 1.45);
    const auto astar = grid_shortest(g, a, b, false);
    const auto dij = grid_shortest(g, a, b, true);
    CHECK(astar.has_value() == dij.has_value());
    if (astar && dij) CHECK(*astar == doctest::Approx(*dij).epsilon(1e-9));

    oracle::Box box;
    box.nx = g.dims.x;
    box.ny = g.dims.y;
    box.nz = g.dims.z;
    box.blocked = g.blocked;
    const Index3 ca = g.cell_of(a), cb = g.cell_of(b);
    box.blocked[box.id(ca.x, ca.y, ca.z)] = 0;
    const auto ref = oracle::shortest(box, ca.x, ca.y, ca.z, cb.x, cb.y, cb.z, true);
    CHECK(ref.has_value() == dij.has_value());
    if (ref && dij) CHECK(*dij == doctest::Approx(*ref * oo.voxel).epsilon(1e-9));
  }
}

TEST_CASE("oracle: rasterization and open space") {
  World w;
  w.bounds_min = Vec3(-1, -1, 0);
  w.bounds_max = Vec3(11, 1, 3);
  OracleOptions oo;
  const auto len = oracle_shortest_path(w, oo, Vec3(0, 0, 1.5), Vec3(10, 0, 1.5));
  REQUIRE(len.has_value());
  CHECK(std::abs(*len - 10.0) <= 2 * oo.voxel);

  w.cylinders.push_back({5, 0, 0.5, 0, 3});
  const OracleGrid g = rasterize(w, oo);
  for (int x = 0; x < g.dims.x; x += 3)
    for (int y = 0; y < g.dims.y; y += 3)
      for (int z = 0; z < g.dims.z; ++z) {
        const Index3 i{x, y, z};
        const bool expect = w.distance(g.center(i)) < oo.inflation;
        CHECK(static_cast<bool>(g.blocked[g.linear(i)]) == expect);
      }
  const auto around = oracle_shortest_path(w, oo, Vec3(0, 0, 1.5), Vec3(10, 0, 1.5));
  REQUIRE(around.has_value());
  CHECK(*around > *len);

  CHECK_THROWS_AS((void)oracle_shortest_path(w, oo, Vec3(50, 0, 1.5), Vec3(10, 0, 1.5)),
                  PlanningError);
}
