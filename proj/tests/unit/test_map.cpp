#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfp/map/bresenham.hpp"
#include "mfp/map/grid_io.hpp"
#include "mfp/map/sliding_grid.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

using namespace mfp;
using namespace mfp::map;

namespace {

bool same(const Index3& a, const Index3& b) { return a == b; }

std::set<std::tuple<int, int, int>> as_set(const std::vector<Index3>& v) {
  std::set<std::tuple<int, int, int>> s;
  for (const auto& i : v) s.insert({i.x, i.y, i.z});
  return s;
}

// Independent line rasterizer: walk the segment in small steps and record the
// nearest lattice point whenever the dominant coordinate crosses an integer.
std::vector<Index3> sampled_line(const Index3& a, const Index3& b) {
  const double d[3] = {double(b.x - a.x), double(b.y - a.y), double(b.z - a.z)};
  int dom = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(d[k]) > std::abs(d[dom])) dom = k;
  const int steps = std::abs(static_cast<int>(d[dom]));
  std::vector<Index3> out;
  if (steps == 0) return {a};
  const int samples = steps * 10;
  for (int n = 0; n <= samples; ++n) {
    if (n % 10 != 0) continue;  // dominant coordinate integral here
    const double t = double(n) / samples;
    Index3 p;
    for (int k = 0; k < 3; ++k) {
      const double c = a[k] + t * d[k];
      // ties toward the start point
      const double r = (d[k] >= 0) ? std::ceil(c - 0.5) : std::floor(c + 0.5);
      p[k] = static_cast<int>(r);
    }
    out.push_back(p);
  }
  return out;
}

DepthScan single_ray(const Vec3& origin, const Vec3& hit) {
  DepthScan s;
  s.origin = origin;
  s.points = {hit};
  s.max_range = 10.0;
  return s;
}

}  // namespace

TEST_CASE("world_to_voxel identity and bounds") {
  SlidingGrid g(Vec3::Zero(), Vec3(2, 2, 2), 0.1);
  CHECK(g.dims() == Index3{20, 20, 20});
  auto i = g.world_to_voxel(Vec3::Zero());
  REQUIRE(i);
  CHECK(*i == Index3{10, 10, 10});
  CHECK((g.voxel_center(*i) - Vec3::Zero()).cwiseAbs().maxCoeff() <= 0.05 + 1e-12);
  CHECK_FALSE(g.world_to_voxel(Vec3(5, 0, 0)));
  CHECK_THROWS_AS(g.voxel_of(Vec3(5, 0, 0)), PlanningError);
}

TEST_CASE("half-open binning assigns each boundary point exactly one voxel") {
  SlidingGrid g(Vec3::Zero(), Vec3(1, 1, 1), 0.1);
  // Brute force: a 3x3x3 lattice of points on shared voxel faces/edges/corners.
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        const Vec3 p(a * 0.1, b * 0.1, c * 0.1);
        int owners = 0;
        for (int x = 0; x < g.dims().x; ++x)
          for (int y = 0; y < g.dims().y; ++y)
            for (int z = 0; z < g.dims().z; ++z) {
              const Vec3 lo = g.voxel_center({x, y, z}) - Vec3::Constant(0.05);
              bool inside = true;
              for (int k = 0; k < 3; ++k) {
                const double u = (p[k] - lo[k]) / 0.1;
                inside = inside && u > -1e-9 && u < 1 - 1e-9;
              }
              if (inside) {
                ++owners;
                auto i = g.world_to_voxel(p);
                REQUIRE(i);
                CHECK(*i == Index3{x, y, z});
              }
            }
        CHECK(owners == 1);
      }
  // the upper window face is outside
  CHECK_FALSE(g.world_to_voxel(Vec3(0.5, 0, 0)));
  CHECK(g.world_to_voxel(Vec3(-0.5, 0, 0)));
}

TEST_CASE("bresenham basic cases") {
  auto l = bresenham3d({0, 0, 0}, {3, 0, 0});
  REQUIRE(l.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(l[i] == Index3{i, 0, 0});
  auto one = bresenham3d({0, 0, 0}, {0, 0, 0});
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Index3{0, 0, 0});
}

TEST_CASE("bresenham matches sampled rasterizer") {
  auto l = bresenham3d({0, 0, 0}, {5, 3, 2});
  auto ref = sampled_line({0, 0, 0}, {5, 3, 2});
  REQUIRE(l.size() == ref.size());
  for (std::size_t k = 0; k < l.size(); ++k) CHECK(same(l[k], ref[k]));

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> u(-12, 12);
  for (int trial = 0; trial < 500; ++trial) {
    Index3 a{u(rng), u(rng), u(rng)};
    Index3 b{u(rng), u(rng), u(rng)};
    auto line = bresenham3d(a, b);
    REQUIRE(line.front() == a);
    REQUIRE(line.back() == b);
    for (std::size_t k = 1; k < line.size(); ++k) {
      for (int ax = 0; ax < 3; ++ax) CHECK(std::abs(line[k][ax] - line[k - 1][ax]) <= 1);
    }
    CHECK(as_set(line) == as_set(bresenham3d(b, a)));
    // dominant axis monotone, one step per element
    int dom = 0;
    for (int ax = 1; ax < 3; ++ax)
      if (std::abs(b[ax] - a[ax]) > std::abs(b[dom] - a[dom])) dom = ax;
    CHECK(line.size() == static_cast<std::size_t>(std::abs(b[dom] - a[dom]) + 1));
  }
}

TEST_CASE("fuse single ray hit") {
  SlidingGrid g(Vec3::Zero(), Vec3(20, 20, 6), 0.1);
  const Vec3 o(0.05, 0.05, 0.05);
  const Vec3 hit(5.05, 0.05, 0.05);
  g.fuse_scan(single_ray(o, hit));
  auto ref = bresenham3d(g.voxel_of(o), g.voxel_of(hit));
  std::size_t free_n = 0, occ_n = 0;
  for (auto c : g.cells()) {
    free_n += c == 1;
    occ_n += c == 2;
  }
  CHECK(free_n == ref.size() - 1);
  CHECK(free_n == 50);
  CHECK(occ_n == 1);
  CHECK(g.query(hit) == VoxelState::Occupied);
  CHECK(g.query(Vec3(2.0, 0.05, 0.05)) == VoxelState::Free);
  CHECK(g.stamp() == 1);
}

TEST_CASE("empty scan only bumps stamp") {
  SlidingGrid g(Vec3::Zero(), Vec3(4, 4, 4), 0.1);
  auto before = g.cells();
  DepthScan s;
  s.origin = Vec3(0.01, 0.01, 0.01);
  g.fuse_scan(s);
  CHECK(g.cells() == before);
  CHECK(g.stamp() == 1);
}

TEST_CASE("max-range ray carves free only") {
  SlidingGrid g(Vec3::Zero(), Vec3(30, 30, 6), 0.1);
  DepthScan s;
  s.origin = Vec3(0.05, 0.05, 0.05);
  s.max_range = 10.0;
  s.max_range_dirs = {Vec3(1, 0, 0)};
  g.fuse_scan(s);
  std::size_t free_n = 0, occ_n = 0;
  for (auto c : g.cells()) {
    free_n += c == 1;
    occ_n += c == 2;
  }
  CHECK(occ_n == 0);
  CHECK(free_n == bresenham3d(g.voxel_of(s.origin), g.voxel_of(Vec3(10.05, 0.05, 0.05))).size());
}

TEST_CASE("ray leaving the window is clipped and carves free") {
  SlidingGrid g(Vec3::Zero(), Vec3(4, 4, 4), 0.1);
  g.fuse_scan(single_ray(Vec3(0.05, 0.05, 0.05), Vec3(7.05, 0.05, 0.05)));
  CHECK(g.query(Vec3(1.95, 0.05, 0.05)) == VoxelState::Free);
  for (auto c : g.cells()) CHECK(c != 2);
}

TEST_CASE("fusion invariants: hits dominate and repeat fusion is idempotent") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  SlidingGrid g(Vec3::Zero(), Vec3(10, 10, 4), 0.1);
  DepthScan s;
  s.origin = Vec3(0.03, -0.02, 0.01);
  for (int i = 0; i < 400; ++i) {
    Vec3 p(u(rng), u(rng), u(rng) * 0.4);
    s.points.push_back(p);
  }
  g.fuse_scan(s);
  for (const Vec3& p : s.points) CHECK(g.query(p) == VoxelState::Occupied);
  auto once = g.cells();
  g.fuse_scan(s);
  CHECK(g.cells() == once);
  CHECK(g.stamp() == 2);
}

TEST_CASE("later pass-through resets a stale hit") {
  SlidingGrid g(Vec3::Zero(), Vec3(10, 10, 4), 0.1);
  const Vec3 o(0.05, 0.05, 0.05);
  g.fuse_scan(single_ray(o, Vec3(2.05, 0.05, 0.05)));
  CHECK(g.query(Vec3(2.05, 0.05, 0.05)) == VoxelState::Occupied);
  g.fuse_scan(single_ray(o, Vec3(4.05, 0.05, 0.05)));
  CHECK(g.query(Vec3(2.05, 0.05, 0.05)) == VoxelState::Free);
}

TEST_CASE("slide_to preserves overlap") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> st(0, 2);
  SlidingGrid g(Vec3::Zero(), Vec3(1, 1, 1), 0.1);
  for (int x = 0; x < 10; ++x)
    for (int y = 0; y < 10; ++y)
      for (int z = 0; z < 10; ++z) g.set_state({x, y, z}, static_cast<VoxelState>(st(rng)));
  const SlidingGrid before = g;

  g.slide_to(before.center());
  CHECK(g.cells() == before.cells());

  g.slide_to(before.center() + Vec3(0.1, 0, 0));
  CHECK(g.center().x() == doctest::Approx(before.center().x() + 0.1));
  for (int x = 0; x < 10; ++x)
    for (int y = 0; y < 10; ++y)
      for (int z = 0; z < 10; ++z) {
        const Vec3 p = g.voxel_center({x, y, z});
        if (before.contains(p)) {
          CHECK(g.query(p) == before.query(p));
        } else {
          CHECK(g.query(p) == VoxelState::Unknown);
        }
      }

  g.slide_to(Vec3(5, 5, 5));
  for (auto c : g.cells()) CHECK(c == 0);
}

TEST_CASE("query defaults") {
  SlidingGrid g(Vec3::Zero(), Vec3(2, 2, 2), 0.1);
  CHECK(g.query(Vec3(0.3, 0.2, -0.1)) == VoxelState::Unknown);
  CHECK(g.query(Vec3(30, 0, 0)) == VoxelState::Unknown);
}

TEST_CASE("project_goal") {
  SlidingGrid g(Vec3::Zero(), Vec3(4, 4, 2), 0.1);
  for (int x = 0; x < g.dims().x; ++x)
    for (int y = 0; y < g.dims().y; ++y)
      for (int z = 0; z < g.dims().z; ++z) g.set_state({x, y, z}, VoxelState::Free);

  SUBCASE("inside and free") {
    const Vec3 gt(1.23, -0.47, 0.31);
    const Vec3 got = g.project_goal(Vec3::Zero(), gt);
    CHECK((got - g.voxel_center(g.voxel_of(gt))).norm() < 1e-12);
  }
  SUBCASE("far outside along +x lands on the +x face") {
    CHECK(g.project_into_window(Vec3::Zero(), Vec3(100, 0, 0)).x() ==
          doctest::Approx(2.0).epsilon(1e-6));
    const Vec3 got = g.project_goal(Vec3::Zero(), Vec3(100, 0, 0));
    CHECK(got.x() == doctest::Approx(1.95));
    CHECK(std::abs(got.y()) <= 0.05 + 1e-12);
  }
  SUBCASE("occupied target matches brute-force argmin") {
    std::mt19937 rng(5);
    for (const bool frontier_only : {false, true}) {
    CAPTURE(frontier_only);
    const auto mode = frontier_only ? GoalCandidates::FreeOrFrontier : GoalCandidates::FreeOrUnknown;
    std::bernoulli_distribution occ(0.5);
    std::uniform_int_distribution<int> st(0, 2);
    std::uniform_real_distribution<double> u(-1.99, 1.99);
    for (int trial = 0; trial < 30; ++trial) {
      for (int x = 0; x < g.dims().x; ++x)
        for (int y = 0; y < g.dims().y; ++y)
          for (int z = 0; z < g.dims().z; ++z) {
            // mostly occupied, sparse free cells, the rest unknown
            const int r = st(rng);
            g.set_state({x, y, z}, occ(rng) ? VoxelState::Occupied
                                            : static_cast<VoxelState>(r == 2 ? 0 : r));
          }
      const Vec3 gt(u(rng), u(rng), u(rng) * 0.5);
      const Vec3 got = g.project_goal(Vec3::Zero(), gt, std::nullopt, mode);
      CHECK(g.query(got) != VoxelState::Occupied);
      double best = std::numeric_limits<double>::infinity();
      for (int x = 0; x < g.dims().x; ++x)
        for (int y = 0; y < g.dims().y; ++y)
          for (int z = 0; z < g.dims().z; ++z) {
            const Index3 i{x, y, z};
            const VoxelState s = g.state(i);
            bool cand = s == VoxelState::Free;
            if (s == VoxelState::Unknown && !frontier_only) cand = true;
            if (s == VoxelState::Unknown && frontier_only) {
              for (const Index3 f : {Index3{1, 0, 0}, Index3{-1, 0, 0}, Index3{0, 1, 0},
                                     Index3{0, -1, 0}, Index3{0, 0, 1}, Index3{0, 0, -1}}) {
                const Index3 n = i + f;
                if (g.in_bounds(n) && g.state(n) == VoxelState::Free) cand = true;
              }
            }
            if (cand) best = std::min(best, (g.voxel_center(i) - gt).norm());
          }
      CHECK((got - gt).norm() == doctest::Approx(best).epsilon(1e-12));
    }
    }
  }
  SUBCASE("fully occupied window has no feasible goal") {
    for (int x = 0; x < g.dims().x; ++x)
      for (int y = 0; y < g.dims().y; ++y)
        for (int z = 0; z < g.dims().z; ++z) g.set_state({x, y, z}, VoxelState::Occupied);
    CHECK_THROWS_AS(g.project_goal(Vec3::Zero(), Vec3(1, 1, 0)), PlanningError);
  }
}

TEST_CASE("grid snapshot round trip") {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> st(0, 2);
  SlidingGrid g(Vec3(3.3, -1.2, 0.9), Vec3(2, 1.5, 1), 0.1);
  for (int x = 0; x < g.dims().x; ++x)
    for (int y = 0; y < g.dims().y; ++y)
      for (int z = 0; z < g.dims().z; ++z) g.set_state({x, y, z}, static_cast<VoxelState>(st(rng)));
  DepthScan s;
  s.origin = g.center();
  g.fuse_scan(s);
  std::stringstream ss;
  write_grid(ss, g);
  SlidingGrid back = read_grid(ss);
  CHECK(back.dims() == g.dims());
  CHECK(back.lattice_origin() == g.lattice_origin());
  CHECK(back.stamp() == g.stamp());
  CHECK(back.cells() == g.cells());

  std::stringstream bad("XXXX");
  CHECK_THROWS(read_grid(bad));
}
