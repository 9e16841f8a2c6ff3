#include "mfp/config/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mfp::config {

namespace {

constexpr double kDeg = M_PI / 180.0;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x)) {
    throw std::invalid_argument("expected a number, got '" + v + "'");
  }
  return x;
}

long long to_int(const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(15);
  os << x;
  return os.str();
}

Field num(std::string key, std::string help, double& ref, double scale = 1.0) {
  return {std::move(key), std::move(help), [&ref, scale](const std::string& v) { ref = to_double(v) * scale; },
          [&ref, scale] { return fmt(ref / scale); }};
}

template <typename I>
Field integer(std::string key, std::string help, I& ref) {
  return {std::move(key), std::move(help),
          [&ref](const std::string& v) {
            const long long x = to_int(v);
            if constexpr (std::is_unsigned_v<I>) {
              if (x < 0) throw std::invalid_argument("expected a non-negative integer");
            }
            ref = static_cast<I>(x);
          },
          [&ref] { return std::to_string(ref); }};
}

Field flag(std::string key, std::string help, bool& ref) {
  return {std::move(key), std::move(help), [&ref](const std::string& v) { ref = to_bool(v); },
          [&ref] { return std::string(ref ? "true" : "false"); }};
}

Field text(std::string key, std::string help, std::string& ref) {
  return {std::move(key), std::move(help), [&ref](const std::string& v) { ref = v; },
          [&ref] { return ref; }};
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + msg
                                  : source + ": " + msg),
      line_(line) {}

std::vector<Field> fields(ScenarioConfig& c) {
  auto& w = c.world;
  auto& e = c.episode;
  auto& r = e.replan;
  std::vector<Field> f;
  f.push_back({"world.type", "forest | bugtrap | office | empty | file",
               [&w](const std::string& v) {
                 if (v != "forest" && v != "bugtrap" && v != "office" && v != "empty" && v != "file") {
                   throw std::invalid_argument("unknown world type '" + v + "'");
                 }
                 w.type = v;
               },
               [&w] { return w.type; }});
  f.push_back(text("world.file", "world file path (world.type = file)", w.file));
  f.push_back(integer("world.seed", "generator seed", w.seed));
  f.push_back(num("forest.side", "forest square side (m)", w.forest.side));
  f.push_back(num("forest.density", "obstacles per square metre", w.forest.density));
  f.push_back(num("forest.radius_min", "smallest obstacle radius (m)", w.forest.radius_min));
  f.push_back(num("forest.radius_max", "largest obstacle radius (m)", w.forest.radius_max));
  f.push_back(num("forest.height", "obstacle height (m)", w.forest.height));
  f.push_back(num("forest.box_fraction", "share of obstacles that are boxes", w.forest.box_fraction));
  f.push_back(num("forest.clear_radius", "obstacle-free disc around start and goal (m)", w.forest.clear_radius));
  f.push_back(num("forest.flight_z", "start and goal height (m)", w.forest.flight_z));
  f.push_back(num("bugtrap.inner_size", "enclosure inner side (m)", w.bugtrap.inner_size));
  f.push_back(num("bugtrap.wall", "wall thickness (m)", w.bugtrap.wall));
  f.push_back(num("bugtrap.height", "wall height (m)", w.bugtrap.height));
  f.push_back(num("bugtrap.opening_width", "opening width (m)", w.bugtrap.opening_width));
  f.push_back(num("bugtrap.goal_distance", "goal distance from the start (m)", w.bugtrap.goal_distance));
  f.push_back(num("office.wall", "wall thickness (m)", w.office.wall));
  f.push_back(num("office.height", "wall height (m)", w.office.height));
  f.push_back(num("empty.goal_distance", "goal distance in the empty world (m)", w.empty_goal_distance));
  f.push_back(integer("sensor.h_rays", "horizontal ray count", e.sensor.h_rays));
  f.push_back(integer("sensor.v_rays", "vertical ray count", e.sensor.v_rays));
  f.push_back(num("sensor.hfov_deg", "horizontal field of view (deg)", e.sensor.hfov, kDeg));
  f.push_back(num("sensor.vfov_deg", "vertical field of view (deg)", e.sensor.vfov, kDeg));
  f.push_back(num("sensor.range", "sensing range (m)", e.sensor.max_range));
  f.push_back(num("sensor.rate_hz", "sensor rate (Hz)", e.sensor.rate_hz));
  f.push_back(num("map.side_xy", "sliding map side in x and y (m)", e.map.side_xy));
  f.push_back(num("map.side_z", "sliding map height (m)", e.map.side_z));
  f.push_back(num("map.voxel", "voxel size (m)", e.map.voxel));
  f.push_back(num("map.rate_hz", "fusion rate (Hz)", e.map.rate_hz));
  f.push_back(integer("map.margin_voxels", "extra inflation voxels beyond the drone radius", e.map.margin_voxels));
  f.push_back(num("map.z_min", "flight band bottom (m)", e.map.z_min));
  f.push_back(num("map.z_max", "flight band top (m)", e.map.z_max));
  f.push_back(num("map.start_bubble", "radius marked free around the start (m)", e.map.start_bubble));
  f.push_back(num("replan.rate_hz", "replanning rate (Hz)", e.replan_rate_hz));
  f.push_back({"replan.commit_mode", "fixed | adaptive",
               [&e](const std::string& v) {
                 if (v == "fixed") e.commit_mode = sim::CommitMode::Fixed;
                 else if (v == "adaptive") e.commit_mode = sim::CommitMode::Adaptive;
                 else throw std::invalid_argument("expected fixed or adaptive, got '" + v + "'");
               },
               [&e] { return std::string(e.commit_mode == sim::CommitMode::Fixed ? "fixed" : "adaptive"); }});
  f.push_back(num("replan.commit_delay", "look-ahead to the commit point (s)", e.commit_delay));
  f.push_back(num("replan.R_a_min", "smallest local radius (m)", r.R_a_min));
  f.push_back(num("replan.R_a_max", "largest local radius (m)", r.R_a_max));
  f.push_back(num("replan.R_b", "velocity-layer radius (m)", r.R_b));
  f.push_back(flag("replan.shrink_on_fail", "retry at R_a_min when no terminal is feasible",
                   r.shrink_on_fail));
  f.push_back(num("replan.alpha0_deg", "angle that opens the second branch (deg)", r.alpha0, kDeg));
  f.push_back(integer("replan.samples_total", "terminal samples per replan", r.samples_total));
  f.push_back(num("replan.arc_step_deg", "spacing of arc and ring samples (deg)", r.arc_step, kDeg));
  f.push_back({"replan.ring_offsets_deg", "comma separated ring offsets (deg)",
               [&r](const std::string& v) {
                 std::vector<double> out;
                 std::stringstream ss(v);
                 std::string item;
                 while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)) * kDeg);
                 if (out.empty()) throw std::invalid_argument("empty list");
                 r.ring_offsets = out;
               },
               [&r] {
                 std::string s;
                 for (std::size_t i = 0; i < r.ring_offsets.size(); ++i) {
                   s += (i ? "," : "") + fmt(r.ring_offsets[i] / kDeg);
                 }
                 return s;
               }});
  f.push_back(integer("replan.ring_points", "samples per ring", r.ring_points));
  f.push_back(num("replan.r_drone", "vehicle radius (m)", r.r_drone));
  f.push_back(num("limits.v_max", "velocity bound (m/s)", r.limits.v_max));
  f.push_back(num("limits.a_max", "acceleration bound (m/s^2)", r.limits.a_max));
  f.push_back(num("limits.j_max", "jerk bound (m/s^3)", r.limits.j_max));
  f.push_back(integer("jerk.N", "jerk primitive steps", r.jerk.N));
  f.push_back(num("jerk.gamma", "dt growth factor", r.jerk.gamma));
  f.push_back(integer("jerk.max_growth", "dt growth cap", r.jerk.max_growth));
  f.push_back(num("jerk.dt_min", "smallest dt (s)", r.jerk.dt_min));
  f.push_back(num("jerk.kkt_tol", "KKT residual tolerance", r.jerk.kkt_tol));
  f.push_back(num("jerk.pos_tol", "terminal position tolerance (m)", r.jerk.pos_tol));
  f.push_back(num("jerk.vel_tol", "terminal velocity tolerance (m/s)", r.jerk.vel_tol));
  f.push_back(num("jerk.acc_tol", "terminal acceleration tolerance (m/s^2)", r.jerk.acc_tol));
  f.push_back(num("jerk.q_pos", "terminal position weight", r.jerk.Q.diag(0)));
  f.push_back(num("jerk.q_vel", "terminal velocity weight", r.jerk.Q.diag(3)));
  f.push_back(num("jerk.q_acc", "terminal acceleration weight", r.jerk.Q.diag(6)));
  f.push_back(integer("vel.N", "velocity primitive steps", r.vel.N));
  f.push_back(num("vel.gamma", "dt growth factor", r.vel.gamma));
  f.push_back(integer("vel.max_growth", "dt growth cap", r.vel.max_growth));
  f.push_back(num("vel.dt_min", "smallest dt (s)", r.vel.dt_min));
  f.push_back(num("vel.kkt_tol", "KKT residual tolerance", r.vel.kkt_tol));
  f.push_back(num("sim.dt", "simulation step (s)", e.dt));
  f.push_back(num("sim.timeout", "episode time limit (s)", e.timeout));
  f.push_back(num("sim.goal_tolerance", "success distance to the goal (m)", e.goal_tolerance));
  f.push_back(integer("sim.cloud_capacity", "unfused clouds kept for collision checks", e.cloud_capacity));
  f.push_back(num("sim.yaw_rate", "yaw rate limit (rad/s)", e.yaw_rate));
  f.push_back(flag("sim.record_vehicle", "keep the 200 Hz vehicle trace", e.record_vehicle));
  f.push_back(flag("sim.record_paths", "keep JPS paths per replan", e.record_paths));
  f.push_back(num("oracle.voxel", "known-map oracle resolution (m)", c.oracle_voxel));
  return f;
}

namespace {

/// Keeps the per-axis weights uniform after q_* edits.
void sync_weights(ScenarioConfig& c) {
  auto& d = c.episode.replan.jerk.Q.diag;
  c.episode.replan.jerk.Q = primitives::TerminalWeight::uniform(d(0), d(3), d(6));
}

}  // namespace

void ScenarioConfig::validate() const {
  const std::string src = "config";
  try {
    episode.validate();
  } catch (const PlanningError& e) {
    throw ConfigError(src, 0, e.what());
  }
  const auto& d = episode.replan.jerk.Q.diag;
  if (!(d.minCoeff() > 0.0)) throw ConfigError(src, 0, "jerk.q_* must be positive");
  if (world.type == "file") {
    if (world.file.empty()) throw ConfigError(src, 0, "world.file is required for world.type = file");
    if (!std::filesystem::exists(world.file)) {
      throw ConfigError(src, 0, "world.file '" + world.file + "' does not exist");
    }
  }
  const auto& fo = world.forest;
  if (!(fo.side > 0.0) || fo.density < 0.0 || !(fo.radius_min > 0.0) || fo.radius_max < fo.radius_min ||
      fo.box_fraction < 0.0 || fo.box_fraction > 1.0) {
    throw ConfigError(src, 0, "forest.* values are inconsistent");
  }
  if (!(world.empty_goal_distance > 0.0)) throw ConfigError(src, 0, "empty.goal_distance must be positive");
  if (!(oracle_voxel > 0.0)) throw ConfigError(src, 0, "oracle.voxel must be positive");
}

sim::OracleOptions ScenarioConfig::oracle_options() const {
  sim::OracleOptions o;
  o.voxel = oracle_voxel;
  o.inflation = episode.replan.r_drone;
  o.z_min = episode.map.z_min;
  o.z_max = episode.map.z_max;
  return o;
}

std::string env_name(const std::string& key) {
  std::string s = "MFP_";
  for (char ch : key) s += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

void apply_text(ScenarioConfig& cfg, std::istream& is, const std::string& source) {
  auto fs = fields(cfg);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    auto it = std::find_if(fs.begin(), fs.end(), [&](const Field& f) { return f.key == key; });
    if (it == fs.end()) throw ConfigError(source, line, "unknown key '" + key + "'");
    try {
      it->set(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, line, key + ": " + e.what());
    }
  }
  sync_weights(cfg);
}

void apply_env(ScenarioConfig& cfg, const std::function<const char*(const char*)>& lookup) {
  auto get = lookup ? lookup : [](const char* n) -> const char* { return std::getenv(n); };
  for (auto& f : fields(cfg)) {
    const std::string name = env_name(f.key);
    const char* v = get(name.c_str());
    if (!v) continue;
    try {
      f.set(trim(v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name, 0, e.what());
    }
  }
  sync_weights(cfg);
}

ScenarioConfig load_config(const std::string& path, bool use_env) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path, 0, "cannot open config file");
  ScenarioConfig cfg;
  apply_text(cfg, is, path);
  if (use_env) apply_env(cfg);
  // Relative world files resolve against the config's directory.
  if (cfg.world.type == "file" && !cfg.world.file.empty() &&
      std::filesystem::path(cfg.world.file).is_relative()) {
    const auto base = std::filesystem::path(path).parent_path();
    cfg.world.file = (base / cfg.world.file).lexically_normal().string();
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path, 0, e.what());
  }
  return cfg;
}

std::string reference_config() {
  ScenarioConfig cfg;
  std::ostringstream os;
  os << "# Reference scenario config: every key with its default.\n"
        "# Any key can be overridden by the environment, e.g. map.voxel -> MFP_MAP_VOXEL.\n";
  std::string section;
  for (auto& f : fields(cfg)) {
    const std::string sec = f.key.substr(0, f.key.find('.'));
    if (sec != section) {
      os << "\n";
      section = sec;
    }
    os << "# " << f.help << "\n" << f.key << " = " << f.get() << "\n";
  }
  return os.str();
}

sim::World build_world(const WorldSpec& spec, std::optional<std::uint64_t> seed) {
  const std::uint64_t s = seed.value_or(spec.seed);
  sim::World w;
  if (spec.type == "forest") {
    w = sim::gen_forest(s, spec.forest);
  } else if (spec.type == "bugtrap") {
    w = sim::gen_bugtrap(spec.bugtrap);
  } else if (spec.type == "office") {
    w = sim::gen_office(spec.office);
  } else if (spec.type == "empty") {
    w.name = "empty";
    w.start = Vec3(0, 0, 1.5);
    w.goal = Vec3(spec.empty_goal_distance, 0, 1.5);
    w.bounds_min = Vec3(-5, -5, 0);
    w.bounds_max = Vec3(spec.empty_goal_distance + 5, 5, 4);
  } else if (spec.type == "file") {
    w = sim::load_world(spec.file);
  } else {
    throw PlanningError(PlanningError::Code::InvalidArgument, "unknown world type " + spec.type);
  }
  w.seed = s;
  return w;
}

}  // namespace mfp::config
