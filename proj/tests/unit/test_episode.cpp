#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfp/config/scenario.hpp"
#include "mfp/sim/episode.hpp"
#include "mfp/sim/oracle.hpp"
#include "mfp/sim/trace_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

using namespace mfp;
using namespace mfp::sim;

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    return static_cast<int>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv read_csv(const std::filesystem::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  Csv c;
  std::string line;
  std::getline(is, line);
  c.header = split(line);
  while (std::getline(is, line)) c.rows.push_back(split(line));
  return c;
}

World empty_world() {
  config::WorldSpec spec;
  spec.type = "empty";
  spec.empty_goal_distance = 10.0;
  return config::build_world(spec);
}

const EpisodeResult& empty_run() {
  static const EpisodeResult res = [] {
    EpisodeConfig cfg;
    cfg.record_paths = true;
    return run_episode(empty_world(), cfg);
  }();
  return res;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("aggregate and median") {
  const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
  const Aggregate a = aggregate(v);
  CHECK(a.count == 8u);
  CHECK(a.avg == doctest::Approx(31.0 / 8.0));
  double ss = 0;
  for (double x : v) ss += (x - 31.0 / 8.0) * (x - 31.0 / 8.0);
  CHECK(a.std == doctest::Approx(std::sqrt(ss / 8.0)));
  CHECK(a.min == 1.0);
  CHECK(a.max == 9.0);
  CHECK(median(v) == 3.5);
  CHECK(median({2, 7, 1}) == 2.0);
  CHECK(aggregate({}).count == 0u);
}

TEST_CASE("empty world: straight flight close to the oracle length") {
  const auto& res = empty_run();
  const World w = empty_world();
  CHECK(res.metrics.outcome == Outcome::Success);
  CHECK(res.metrics.commit_violations == 0);
  const auto oracle = oracle_shortest_path(w, OracleOptions{}, w.start, w.goal);
  REQUIRE(oracle.has_value());
  CHECK(res.metrics.path_length <= 1.08 * *oracle);
  CHECK(std::abs(res.metrics.path_length - (w.goal - w.start).norm()) <= 0.05 * 10.0);
  CHECK((res.metrics.final_position - w.goal).norm() <= 0.5);
  // Replans follow the fixed rate and never skip branch selection rules.
  for (const auto& r : res.trace.replans) {
    if (r.success) CHECK((r.branch == 1 || r.branch == 2));
    CHECK(r.commit_delay == doctest::Approx(0.05));
  }
}

TEST_CASE("episodes are deterministic outside wall-clock columns") {
  EpisodeConfig cfg;
  cfg.record_paths = true;
  const World w = empty_world();
  const auto a = run_episode(w, cfg);
  const auto da = temp_dir("mfp_det_a");
  const auto db = temp_dir("mfp_det_b");
  write_traces(da.string(), w, a);
  write_traces(db.string(), w, empty_run());

  for (const char* name : {"vehicle.csv", "jps_paths.csv"}) {
    std::ifstream fa(da / name), fb(db / name);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
  }
  const Csv ra = read_csv(da / "replan.csv");
  const Csv rb = read_csv(db / "replan.csv");
  REQUIRE(ra.rows.size() == rb.rows.size());
  const auto& timing = timing_columns();
  for (std::size_t c = 0; c < ra.header.size(); ++c) {
    if (std::find(timing.begin(), timing.end(), ra.header[c]) != timing.end()) continue;
    for (std::size_t i = 0; i < ra.rows.size(); ++i) {
      CAPTURE(ra.header[c]);
      CHECK(ra.rows[i][c] == rb.rows[i][c]);
    }
  }
  std::filesystem::remove_all(da);
  std::filesystem::remove_all(db);
}

TEST_CASE("summary.json matches aggregates recomputed from the traces") {
  const auto& res = empty_run();
  const World w = empty_world();
  const auto d = temp_dir("mfp_trace");
  write_traces(d.string(), w, res, {{"note", "x"}});
  std::ifstream js(d / "summary.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["note"] == "x");
  CHECK(j["outcome"] == "success");

  const Csv rp = read_csv(d / "replan.csv");
  CHECK(static_cast<int>(rp.rows.size()) == j["replans"].get<int>());
  const int c_total = rp.col("total_ms"), c_jps = rp.col("jps_ms"), c_goal = rp.col("goal_ms");
  std::vector<double> total, jps, goal;
  for (const auto& r : rp.rows) {
    total.push_back(std::stod(r[c_total]));
    jps.push_back(std::stod(r[c_jps]));
    goal.push_back(std::stod(r[c_goal]));
  }
  const auto& st = j["stages"];
  const double sum_total = std::accumulate(total.begin(), total.end(), 0.0);
  const double sum_jps = std::accumulate(jps.begin(), jps.end(), 0.0);
  CHECK(std::abs(st["total_ms"].get<double>() - sum_total / total.size()) <= 1e-9);
  CHECK(std::abs(st["goal_ms"].get<double>() -
                 std::accumulate(goal.begin(), goal.end(), 0.0) / goal.size()) <= 1e-9);
  CHECK(std::abs(st["total_median_ms"].get<double>() - median(total)) <= 1e-9);
  CHECK(std::abs(st["jps_share"].get<double>() - sum_jps / sum_total) <= 1e-9);

  // Path length from vehicle.csv by the trapezoid rule on speed.
  const Csv vc = read_csv(d / "vehicle.csv");
  double len = 0.0;
  for (std::size_t i = 1; i < vc.rows.size(); ++i) {
    auto speed = [&](std::size_t k) {
      return Vec3(std::stod(vc.rows[k][4]), std::stod(vc.rows[k][5]), std::stod(vc.rows[k][6]))
          .norm();
    };
    len += 0.5 * (speed(i - 1) + speed(i)) *
           (std::stod(vc.rows[i][0]) - std::stod(vc.rows[i - 1][0]));
  }
  CHECK(std::abs(len - j["path_length"].get<double>()) <= 1e-9);
  CHECK(j["jerk_solve_ms"]["count"].get<std::size_t>() == res.trace.jerk_solve_ms.size());
  std::filesystem::remove_all(d);
}

TEST_CASE("stage times account for the replan total") {
  const auto& res = empty_run();
  const StageReport s = stage_report(res.trace.replans);
  const double stages = s.goal_ms + s.jps_ms + s.cvx_jerk_ms + s.cvx_vel_ms + s.collision_ms;
  CHECK(stages <= s.total_ms * 1.0001);
  CHECK(stages >= 0.95 * s.total_ms);
  for (const auto& r : res.trace.replans) {
    const auto& t = r.timings;
    CHECK(t.goal_ms + t.jps_ms + t.cvx_jerk_ms + t.cvx_vel_ms + t.collision_ms <=
          t.total_ms * 1.0001 + 1e-6);
  }
}

TEST_CASE("committed_clear") {
  map::SlidingGrid g(Vec3(0, 0, 1.5), Vec3(10, 10, 4), 0.1);
  for (int x = 0; x < g.dims().x; ++x)
    for (int y = 0; y < g.dims().y; ++y)
      for (int z = 0; z < g.dims().z; ++z) g.set_state({x, y, z}, map::VoxelState::Free);
  primitives::Limits lim;
  const auto prim = primitives::solve_jerk(primitives::FlatState::at_rest(Vec3(-2, 0, 1.5)),
                                           primitives::FlatState::at_rest(Vec3(2, 0, 1.5)), lim,
                                           primitives::JerkOptions{});
  CHECK(committed_clear(prim, g, 0.3, 1.0, 2.0));
  CHECK_FALSE(committed_clear(prim, g, 0.3, 1.6, 2.0));  // leaves the band
  g.set_state(g.voxel_of(Vec3(0.0, 0.25, 1.5)), map::VoxelState::Unknown);
  CHECK_FALSE(committed_clear(prim, g, 0.3, 1.0, 2.0));
  CHECK(committed_clear(prim, g, 0.2, 1.0, 2.0));
}

TEST_CASE("room_reversals counts heading reversals inside rooms") {
  World w;
  w.rooms.push_back({0, 0, 2, 2});
  w.rooms.push_back({5, 0, 7, 2});
  auto rec = [](double x, double y, double vx, double vy) {
    VehicleRecord r;
    r.state.pos = Vec3(x, y, 1.5);
    r.state.vel = Vec3(vx, vy, 0);
    return r;
  };
  // Into room 1 heading +y and back out heading -y; straight through room 2.
  std::vector<VehicleRecord> v{rec(1, -1, 0, 1), rec(1, 0.5, 0, 1), rec(1, 1.5, 0, -1),
                               rec(1, -0.5, 0, -1), rec(4, -0.5, 1, 0), rec(6, 1, 1, 0),
                               rec(8, 1, 1, 0)};
  CHECK(room_reversals(w, v) == 1);
  // Back into room 2 from the east, turning around inside.
  v.push_back(rec(6.5, 1, -1, 0));
  v.push_back(rec(6, 1, 1, 0));
  v.push_back(rec(8, 1, 1, 0));
  CHECK(room_reversals(w, v) == 2);
}

TEST_CASE("episode config validation") {
  EpisodeConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.replan_rate_hz = 40.0;
  CHECK_THROWS_AS(cfg.validate(), PlanningError);
  EpisodeConfig small;
  small.map.side_xy = 2.0 * small.replan.R_b;
  CHECK_THROWS_AS(small.validate(), PlanningError);
}
