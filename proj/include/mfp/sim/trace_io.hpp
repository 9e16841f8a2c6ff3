#pragma once

#include "mfp/sim/episode.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mfp::sim {

/// Mean, population standard deviation, min and max of a sample.
struct Aggregate {
  std::size_t count = 0;
  double avg = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};
Aggregate aggregate(const std::vector<double>& v);
double median(std::vector<double> v);
nlohmann::json to_json(const Aggregate& a);

/// Stage-time means and medians over successful and failed replans alike.
struct StageReport {
  std::size_t replans = 0;
  double goal_ms = 0.0;
  double jps_ms = 0.0;
  double cvx_jerk_ms = 0.0;
  double cvx_vel_ms = 0.0;
  double collision_ms = 0.0;
  double total_ms = 0.0;
  double total_median_ms = 0.0;
  double jps_median_ms = 0.0;
  double jps_share = 0.0;  // sum of jps_ms over sum of total_ms
};
StageReport stage_report(const std::vector<ReplanRecord>& replans);
nlohmann::json to_json(const StageReport& r);

nlohmann::json summary_json(const World& world, const EpisodeResult& res);

/// Writes replan.csv, vehicle.csv, fusion.csv, jps_paths.csv and summary.json into dir.
void write_traces(const std::string& dir, const World& world, const EpisodeResult& res,
                  const nlohmann::json& extra = nlohmann::json::object());

/// Columns of replan.csv that hold wall-clock measurements.
const std::vector<std::string>& timing_columns();

}  // namespace mfp::sim
