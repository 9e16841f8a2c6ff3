#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfp/search/grid_path.hpp"
#include "mfp/search/occupancy_mask.hpp"

#include <random>

using namespace mfp;
using namespace mfp::search;

namespace {

GridPath make(std::initializer_list<Vec3> pts) { return GridPath{std::vector<Vec3>(pts)}; }

// Walks the path at fixed arc step and returns the arc length of the first /
// last sample where the distance to c crosses r.
std::pair<double, double> sampled_crossings(const GridPath& p, const Vec3& c, double r,
                                            double step) {
  double first = -1, last = -1, arc = 0;
  bool prev_in = (p.waypoints[0] - c).norm() < r;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Vec3 a = p.waypoints[i], b = p.waypoints[i + 1];
    const double L = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(L / step)));
    for (int k = 1; k <= n; ++k) {
      const Vec3 q = a + (b - a) * (double(k) / n);
      const bool in = (q - c).norm() < r;
      if (in != prev_in) {
        const double s = arc + L * (k - 0.5) / n;
        if (first < 0) first = s;
        last = s;
      }
      prev_in = in;
    }
    arc += L;
  }
  return {first, last};
}

double arc_of(const GridPath& p, const PathPoint& pp) {
  const std::size_t i = pp.next_index - 1;
  return p.arc_length_to(i) + (pp.point - p.waypoints[i]).norm();
}

}  // namespace

TEST_CASE("straight path sphere intersections") {
  auto p = make({Vec3(0, 0, 0), Vec3(10, 0, 0)});
  auto b = first_sphere_intersection(p, Vec3::Zero(), 3.0);
  CHECK_FALSE(b.inside);
  CHECK(b.point.x() == doctest::Approx(3.0));
  CHECK(b.next_index == 1);
  auto c = last_sphere_intersection(p, Vec3::Zero(), 7.0);
  CHECK(c.point.x() == doctest::Approx(7.0));
  CHECK(c.next_index == 1);
}

TEST_CASE("inside convention") {
  auto p = make({Vec3(0, 0, 0), Vec3(2, 0, 0)});
  auto b = first_sphere_intersection(p, Vec3::Zero(), 3.0);
  CHECK(b.inside);
  CHECK(b.point == Vec3(2, 0, 0));
  auto c = last_sphere_intersection(p, Vec3::Zero(), 3.0);
  CHECK(c.inside);
  CHECK(c.point == Vec3(2, 0, 0));
}

TEST_CASE("zig-zag crossings match arc-length sampling") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-6, 6);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    GridPath p;
    p.waypoints.push_back(Vec3::Zero());
    for (int k = 0; k < 6; ++k) p.waypoints.push_back(Vec3(u(rng), u(rng), u(rng) * 0.3));
    const double r = 3.0;
    auto [f_arc, l_arc] = sampled_crossings(p, Vec3::Zero(), r, r / 1000);
    auto b = first_sphere_intersection(p, Vec3::Zero(), r);
    auto c = last_sphere_intersection(p, Vec3::Zero(), r);
    if (f_arc < 0) {
      CHECK(b.inside);
      continue;
    }
    ++checked;
    CHECK((b.point).norm() == doctest::Approx(r).epsilon(1e-9));
    CHECK((c.point).norm() == doctest::Approx(r).epsilon(1e-9));
    CHECK(std::abs(arc_of(p, b) - f_arc) <= r / 1000);
    CHECK(std::abs(arc_of(p, c) - l_arc) <= r / 1000);
    CHECK(arc_of(p, b) <= arc_of(p, c) + 1e-12);
  }
  CHECK(checked > 150);
}

TEST_CASE("intermediate waypoints") {
  auto two = make({Vec3(0, 0, 0), Vec3(10, 0, 0)});
  auto b = first_sphere_intersection(two, Vec3::Zero(), 3);
  auto c = last_sphere_intersection(two, Vec3::Zero(), 7);
  CHECK(intermediate_waypoints(two, b.next_index, c.next_index).empty());

  GridPath six;
  for (int k = 0; k < 6; ++k) six.waypoints.push_back(Vec3(k, 0, 0));
  auto mid = intermediate_waypoints(six, 2, 5);
  REQUIRE(mid.size() == 3);
  CHECK(mid[0] == six.waypoints[2]);
  CHECK(mid[2] == six.waypoints[4]);

  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    GridPath p;
    Vec3 q = Vec3::Zero();
    p.waypoints.push_back(q);
    for (int k = 0; k < 8; ++k) {
      q += Vec3(1.2 + u(rng) * 0.5, u(rng), u(rng) * 0.2);
      p.waypoints.push_back(q);
    }
    const double ra = 1.5, rb = 7.0;
    auto bb = first_sphere_intersection(p, Vec3::Zero(), ra);
    auto cc = last_sphere_intersection(p, Vec3::Zero(), rb);
    if (bb.inside || cc.inside || bb.next_index > cc.next_index) continue;
    for (const Vec3& w : intermediate_waypoints(p, bb.next_index, cc.next_index)) {
      CHECK(w.norm() >= ra - 1e-9);
    }
  }
}

TEST_CASE("first/last blocked crossing") {
  OccupancyMask m({40, 40, 10}, {0, 0, 0}, 0.1);
  auto p = make({m.center({2, 20, 5}), m.center({37, 20, 5})});
  CHECK_FALSE(path_first_last_blocked(p, m));

  m.set_blocked({20, 20, 5}, true);
  auto hit = path_first_last_blocked(p, m);
  REQUIRE(hit);
  CHECK(hit->first.x() == doctest::Approx(2.0));
  CHECK(hit->second.x() == doctest::Approx(2.1));

  auto from_inside = make({m.center({20, 20, 5}), m.center({30, 20, 5})});
  auto h2 = path_first_last_blocked(from_inside, m);
  REQUIRE(h2);
  CHECK((h2->first - from_inside.waypoints[0]).norm() < 1e-12);
}

TEST_CASE("blocked crossings match dense sampling") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> ui(0, 29);
  std::bernoulli_distribution occ(0.03);
  for (int trial = 0; trial < 100; ++trial) {
    OccupancyMask m({30, 30, 30}, {-15, -15, -15}, 0.1);
    for (int x = 0; x < 30; ++x)
      for (int y = 0; y < 30; ++y)
        for (int z = 0; z < 30; ++z) m.set_blocked({x, y, z}, occ(rng));
    GridPath p;
    for (int k = 0; k < 4; ++k) p.waypoints.push_back(m.center({ui(rng), ui(rng), ui(rng)}));
    // dense sampling at s/10
    std::optional<double> f, l;
    double arc = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const Vec3 a = p.waypoints[i], b = p.waypoints[i + 1];
      const double L = (b - a).norm();
      const int n = std::max(1, static_cast<int>(std::ceil(L / 0.01)));
      for (int k = 0; k <= n; ++k) {
        const Vec3 q = a + (b - a) * (double(k) / n);
        if (m.blocked_at(q)) {
          const double s = arc + L * k / n;
          if (!f) f = s;
          l = s;
        }
      }
      arc += L;
    }
    auto got = path_first_last_blocked(p, m);
    CAPTURE(trial);
    REQUIRE(got.has_value() == f.has_value());
    if (!got) continue;
    // locate arc lengths of the returned points
    auto arc_at = [&](const Vec3& x) {
      double acc = 0, best = 1e9, bestarc = 0;
      for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const Vec3 a = p.waypoints[i], b = p.waypoints[i + 1];
        const double L = (b - a).norm();
        const double t = L > 0 ? std::clamp((x - a).dot(b - a) / (L * L), 0.0, 1.0) : 0.0;
        const double d = (a + t * (b - a) - x).norm();
        if (d < best - 1e-12) {
          best = d;
          bestarc = acc + t * L;
        }
        acc += L;
      }
      return bestarc;
    };
    CHECK(std::abs(arc_at(got->first) - *f) <= 0.011);
    CHECK(std::abs(arc_at(got->second) - *l) <= 0.011);
  }
}
