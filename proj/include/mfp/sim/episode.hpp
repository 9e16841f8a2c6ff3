#pragma once

#include "mfp/replan/replan.hpp"
#include "mfp/sim/sensor.hpp"
#include "mfp/sim/world.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mfp::sim {

struct MapConfig {
  double side_xy = 20.0;
  double side_z = 6.0;
  double voxel = 0.10;
  double rate_hz = 10.0;
  int margin_voxels = 1;
  double z_min = 1.0;
  double z_max = 2.0;
  /// Radius of the region marked Free around the start before the first scan.
  double start_bubble = 1.0;
};

enum class CommitMode { Fixed, Adaptive };

struct EpisodeConfig {
  SensorConfig sensor;
  MapConfig map;
  replan::ReplanConfig replan;
  double replan_rate_hz = 20.0;
  CommitMode commit_mode = CommitMode::Fixed;
  /// Look-ahead from replan start to the commit point A (seconds).
  double commit_delay = 0.05;
  double dt = 0.005;
  double timeout = 120.0;
  double goal_tolerance = 0.5;
  std::size_t cloud_capacity = 4;
  double yaw_rate = 2.0;
  bool record_vehicle = true;
  bool record_paths = true;

  /// Throws PlanningError(InvalidArgument) on inconsistent values.
  void validate() const;
};

enum class Outcome { Success, Timeout, Collision };
std::string to_string(Outcome o);

struct ReplanRecord {
  int k = 0;
  double t = 0.0;
  double commit_delay = 0.0;
  bool success = false;
  std::string failure;
  replan::StageTimings timings;
  double J1 = 0.0;
  double J2 = 0.0;
  int branch = 0;
  bool gate_open = false;
  double angle_deg = 0.0;
  double r_a = 0.0;
  double r_b = 0.0;
  int n_qp_solves = 0;
  int n_vel_solves = 0;
  double jerk_solve_ms = 0.0;  // summed over the solves of this replan
  double vel_solve_ms = 0.0;
  std::uint64_t map_stamp = 0;
  std::size_t buffered_clouds = 0;
  std::size_t nn_queries = 0;
  Vec3 A = Vec3::Zero();
  Vec3 G = Vec3::Zero();
  Vec3 B = Vec3::Zero();
  Vec3 Bp = Vec3::Zero();
};

struct VehicleRecord {
  double t = 0.0;
  primitives::FlatState state;
  double yaw = 0.0;
  double clearance = 0.0;
};

struct FusionRecord {
  int k = 0;
  double t = 0.0;
  std::uint64_t scan_id = 0;
  std::uint64_t map_stamp = 0;
  double fuse_ms = 0.0;
  std::size_t hits = 0;
  std::size_t max_range_rays = 0;
};

struct PathRecord {
  int k = 0;
  int branch = 0;
  std::vector<Vec3> points;
};

struct RunMetrics {
  Outcome outcome = Outcome::Timeout;
  bool success = false;
  double path_length = 0.0;
  double flight_time = 0.0;
  double min_clearance = 0.0;
  int replans = 0;
  int replan_failures = 0;
  /// Committed primitives that touched Occupied/Unknown space in their commit-time map.
  int commit_violations = 0;
  Vec3 final_position = Vec3::Zero();
};

struct EpisodeTrace {
  std::vector<ReplanRecord> replans;
  std::vector<VehicleRecord> vehicle;
  std::vector<FusionRecord> fusions;
  std::vector<PathRecord> paths;
  std::vector<double> jerk_solve_ms;  // every jerk QP solve
  std::vector<double> vel_solve_ms;   // every velocity solve
};

struct EpisodeResult {
  RunMetrics metrics;
  EpisodeTrace trace;
};

EpisodeResult run_episode(const World& world, const EpisodeConfig& cfg);

/// Independent commit-time check: every point sampled along `prim` lies in
/// the flight band and no voxel with centre within r of it is Occupied or Unknown.
bool committed_clear(const primitives::JerkPrimitive& prim, const map::SlidingGrid& grid,
                     double r, double z_min, double z_max);

/// Rooms the vehicle entered and left again with reversed heading.
int room_reversals(const World& world, const std::vector<VehicleRecord>& vehicle);

}  // namespace mfp::sim
