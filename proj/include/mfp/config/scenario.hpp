#pragma once

#include "mfp/sim/episode.hpp"
#include "mfp/sim/oracle.hpp"
#include "mfp/sim/world.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfp::config {

struct WorldSpec {
  std::string type = "forest";  // forest | bugtrap | office | empty | file
  std::string file;
  std::uint64_t seed = 1;
  sim::ForestOptions forest;
  sim::BugtrapOptions bugtrap;
  sim::OfficeOptions office;
  double empty_goal_distance = 10.0;
};

struct ScenarioConfig {
  WorldSpec world;
  sim::EpisodeConfig episode;
  double oracle_voxel = 0.1;

  /// Throws ConfigError (line 0) when a constraint fails.
  void validate() const;
  sim::OracleOptions oracle_options() const;
};

/// Config problem; `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// One settable key of ScenarioConfig.
struct Field {
  std::string key;
  std::string help;
  std::function<void(const std::string&)> set;  // throws std::invalid_argument
  std::function<std::string()> get;
};

/// All keys bound to `cfg`, in reference-file order.
std::vector<Field> fields(ScenarioConfig& cfg);

/// Environment variable name overriding `key` (prefix MFP_, dots to underscores, upper case).
std::string env_name(const std::string& key);

/// Applies `key = value` lines on top of `cfg`. '#' starts a comment.
void apply_text(ScenarioConfig& cfg, std::istream& is, const std::string& source = "<config>");
/// Applies MFP_* overrides found through `lookup` (defaults to getenv).
void apply_env(ScenarioConfig& cfg,
               const std::function<const char*(const char*)>& lookup = nullptr);

/// Defaults, then the file, then environment overrides, then validation.
ScenarioConfig load_config(const std::string& path, bool use_env = true);

/// Every key with its default value and a one-line description.
std::string reference_config();

/// Builds the world described by `spec`, with an optional seed override.
sim::World build_world(const WorldSpec& spec, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace mfp::config
