#include "mfp/config/scenario.hpp"
#include "mfp/sim/episode.hpp"
#include "mfp/sim/oracle.hpp"
#include "mfp/sim/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using mfp::config::ConfigError;
using mfp::config::ScenarioConfig;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kPlannerFailure = 2;
constexpr int kConfigError = 3;

/// "a..b" (inclusive) or a single seed.
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      out.push_back(std::stoull(s));
    } else {
      const auto a = std::stoull(s.substr(0, dots));
      const auto b = std::stoull(s.substr(dots + 2));
      if (b < a) throw std::invalid_argument("empty range");
      for (auto i = a; i <= b; ++i) out.push_back(i);
    }
  } catch (const std::exception&) {
    throw ConfigError("--seeds", 0, "expected N or A..B, got '" + s + "'");
  }
  return out;
}

std::vector<double> parse_voxels(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v > 0.0)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--voxels", 0, "bad voxel size '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--voxels", 0, "no voxel sizes given");
  return out;
}

struct SeedRun {
  std::uint64_t seed = 0;
  mfp::sim::World world;
  mfp::sim::EpisodeResult result;
  std::optional<double> oracle;
};

SeedRun run_seed(const ScenarioConfig& cfg, std::uint64_t seed, bool with_oracle) {
  SeedRun r;
  r.seed = seed;
  r.world = mfp::config::build_world(cfg.world, seed);
  r.result = mfp::sim::run_episode(r.world, cfg.episode);
  if (with_oracle) {
    r.oracle = mfp::sim::oracle_shortest_path(r.world, cfg.oracle_options(), r.world.start,
                                              r.world.goal);
  }
  return r;
}

json oracle_fields(const SeedRun& r) {
  json j;
  j["oracle_length"] = r.oracle ? json(*r.oracle) : json(nullptr);
  j["ratio"] = r.oracle ? json(r.result.metrics.path_length / *r.oracle) : json(nullptr);
  return j;
}

void write_json(const fs::path& p, const json& j) {
  fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << std::setw(2) << j << '\n';
}

int cmd_run(const ScenarioConfig& cfg, const std::string& out, const std::vector<std::uint64_t>& seeds,
            bool with_oracle) {
  std::vector<double> dist;
  std::vector<double> ratios;
  json per_seed = json::array();
  int successes = 0;
  for (auto seed : seeds) {
    SeedRun r = run_seed(cfg, seed, with_oracle);
    const auto& m = r.result.metrics;
    const json extra = with_oracle ? oracle_fields(r) : json::object();
    mfp::sim::write_traces((fs::path(out) / ("seed_" + std::to_string(seed))).string(), r.world,
                           r.result, extra);
    if (m.success) {
      ++successes;
      dist.push_back(m.path_length);
      if (r.oracle) ratios.push_back(m.path_length / *r.oracle);
    }
    json s = {{"seed", seed}, {"outcome", mfp::sim::to_string(m.outcome)},
              {"path_length", m.path_length}, {"flight_time", m.flight_time}};
    for (const auto& [k, v] : extra.items()) s[k] = v;
    per_seed.push_back(s);
    std::printf("seed %llu: %s, %.2f m in %.2f s\n", static_cast<unsigned long long>(seed),
                mfp::sim::to_string(m.outcome).c_str(), m.path_length, m.flight_time);
  }
  json agg;
  agg["world"] = cfg.world.type;
  agg["episodes"] = seeds.size();
  agg["successes"] = successes;
  agg["distance"] = mfp::sim::to_json(mfp::sim::aggregate(dist));
  if (with_oracle) agg["ratio"] = mfp::sim::to_json(mfp::sim::aggregate(ratios));
  agg["runs"] = per_seed;
  write_json(fs::path(out) / "aggregate.json", agg);
  const auto a = mfp::sim::aggregate(dist);
  std::printf("successes %d/%zu  distance avg %.2f std %.2f max %.2f min %.2f\n", successes,
              seeds.size(), a.avg, a.std, a.max, a.min);
  return successes == static_cast<int>(seeds.size()) ? kOk : kPlannerFailure;
}

int cmd_sweep(ScenarioConfig cfg, const std::vector<double>& voxels,
              const std::vector<std::uint64_t>& seeds, const std::string& out) {
  json rows = json::array();
  bool all_ok = true;
  std::printf("%7s %7s %8s %8s %9s %9s %9s %9s %9s %7s %7s\n", "voxel", "replans", "goal",
              "jps", "cvx_jerk", "cvx_vel", "collision", "total", "median", "jps%", "sum%");
  for (double v : voxels) {
    cfg.episode.map.voxel = v;
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("--voxels", 0, e.what());
    }
    std::vector<mfp::sim::ReplanRecord> all;
    for (auto seed : seeds) {
      SeedRun r = run_seed(cfg, seed, false);
      all_ok = all_ok && r.result.metrics.success;
      all.insert(all.end(), r.result.trace.replans.begin(), r.result.trace.replans.end());
    }
    const auto rep = mfp::sim::stage_report(all);
    const double sum = rep.goal_ms + rep.jps_ms + rep.cvx_jerk_ms + rep.cvx_vel_ms + rep.collision_ms;
    const double sum_share = rep.total_ms > 0.0 ? sum / rep.total_ms : 0.0;
    json row = mfp::sim::to_json(rep);
    row["voxel"] = v;
    row["stage_sum_share"] = sum_share;
    rows.push_back(row);
    std::printf("%7.3f %7zu %8.3f %8.3f %9.3f %9.3f %9.3f %9.3f %9.3f %6.1f%% %6.1f%%\n", v,
                rep.replans, rep.goal_ms, rep.jps_ms, rep.cvx_jerk_ms, rep.cvx_vel_ms,
                rep.collision_ms, rep.total_ms, rep.total_median_ms, 100.0 * rep.jps_share,
                100.0 * sum_share);
  }
  if (!out.empty()) write_json(fs::path(out) / "sweep.json", {{"rows", rows}});
  return all_ok ? kOk : kPlannerFailure;
}

int cmd_compare(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                const std::string& out) {
  bool all_ok = true;
  json runs = json::array();
  for (auto seed : seeds) {
    SeedRun r = run_seed(cfg, seed, true);
    const auto& m = r.result.metrics;
    all_ok = all_ok && m.success;
    json j = oracle_fields(r);
    j["seed"] = seed;
    j["world"] = r.world.name;
    j["outcome"] = mfp::sim::to_string(m.outcome);
    j["path_length"] = m.path_length;
    j["room_reversals"] = mfp::sim::room_reversals(r.world, r.result.trace.vehicle);
    runs.push_back(j);
    if (r.oracle) {
      std::printf("%s seed %llu: executed %.2f m, known-map %.2f m, ratio %.3f (%s)\n",
                  r.world.name.c_str(), static_cast<unsigned long long>(seed), m.path_length,
                  *r.oracle, m.path_length / *r.oracle, mfp::sim::to_string(m.outcome).c_str());
    } else {
      std::printf("%s seed %llu: executed %.2f m, goal unreachable on the known map (%s)\n",
                  r.world.name.c_str(), static_cast<unsigned long long>(seed), m.path_length,
                  mfp::sim::to_string(m.outcome).c_str());
    }
    if (!out.empty()) {
      mfp::sim::write_traces((fs::path(out) / ("seed_" + std::to_string(seed))).string(), r.world,
                             r.result, oracle_fields(r));
    }
  }
  if (!out.empty()) write_json(fs::path(out) / "compare.json", {{"runs", runs}});
  return all_ok ? kOk : kPlannerFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon planner simulation runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string seeds_arg;
  std::string voxels_arg;
  bool with_oracle = false;

  auto* run = app.add_subcommand("run", "Run episodes and write traces");
  run->add_option("config", config_path, "Scenario config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seeds", seeds_arg, "Seed or inclusive range A..B");
  run->add_flag("--oracle", with_oracle, "Also compute the known-map reference length");

  auto* sweep = app.add_subcommand("sweep-voxel", "Stage timings per voxel size");
  sweep->add_option("config", config_path, "Scenario config file")->required();
  sweep->add_option("--voxels", voxels_arg, "Comma separated voxel sizes")->required();
  sweep->add_option("--seeds", seeds_arg, "Seed or inclusive range A..B");
  sweep->add_option("--out", out_dir, "Directory for sweep.json");

  auto* compare = app.add_subcommand("compare-known", "Executed vs known-map path length");
  compare->add_option("config", config_path, "Scenario config file")->required();
  compare->add_option("--seeds", seeds_arg, "Seed or inclusive range A..B");
  compare->add_option("--out", out_dir, "Directory for traces and compare.json");

  auto* ref = app.add_subcommand("reference-config", "Print every config key with its default");
  ref->add_option("--out", out_dir, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (ref->parsed()) {
      const std::string text = mfp::config::reference_config();
      if (out_dir.empty()) {
        std::cout << text;
      } else {
        std::ofstream os(out_dir);
        if (!os) throw std::runtime_error("cannot write " + out_dir);
        os << text;
      }
      return kOk;
    }
    const ScenarioConfig cfg = mfp::config::load_config(config_path);
    const auto seeds = seeds_arg.empty() ? std::vector<std::uint64_t>{cfg.world.seed}
                                         : parse_seeds(seeds_arg);
    if (run->parsed()) return cmd_run(cfg, out_dir, seeds, with_oracle);
    if (sweep->parsed()) return cmd_sweep(cfg, parse_voxels(voxels_arg), seeds, out_dir);
    if (compare->parsed()) return cmd_compare(cfg, seeds, out_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
