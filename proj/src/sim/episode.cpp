#include "mfp/sim/episode.hpp"

#include "mfp/collision/clearance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

namespace mfp::sim {

namespace {

[[noreturn]] void bad(const std::string& msg) {
  throw PlanningError(PlanningError::Code::InvalidArgument, msg);
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

}  // namespace

void EpisodeConfig::validate() const {
  replan.validate();
  if (!(dt > 0.0)) bad("sim.dt must be positive");
  if (!(timeout > 0.0)) bad("sim.timeout must be positive");
  if (!(goal_tolerance > 0.0)) bad("sim.goal_tolerance must be positive");
  if (!(sensor.rate_hz > 0.0) || !(map.rate_hz > 0.0) || !(replan_rate_hz > 0.0)) {
    bad("rates must be positive");
  }
  if (!(sensor.rate_hz > replan_rate_hz && replan_rate_hz > map.rate_hz)) {
    bad("rates must satisfy sensor > replan > map");
  }
  if (sensor.h_rays <= 0 || sensor.v_rays <= 0) bad("sensor ray counts must be positive");
  if (!(sensor.hfov > 0.0 && sensor.hfov < M_PI) || !(sensor.vfov > 0.0 && sensor.vfov < M_PI)) {
    bad("sensor fov must be in (0, 180) degrees");
  }
  if (!(sensor.max_range > 0.0)) bad("sensor.range must be positive");
  if (!(map.voxel > 0.0)) bad("map.voxel must be positive");
  if (!(map.side_xy > 2.0 * replan.R_b)) bad("map.side_xy must exceed 2 * replan.R_b");
  if (!(map.side_z > 0.0)) bad("map.side_z must be positive");
  if (!(map.z_max > map.z_min)) bad("map.z_max must exceed map.z_min");
  if (map.z_max - map.z_min > map.side_z) bad("flight band taller than the map window");
  if (map.margin_voxels < 0) bad("map.margin_voxels must be >= 0");
  if (map.start_bubble < 0.0) bad("map.start_bubble must be >= 0");
  if (!(commit_delay > 0.0)) bad("replan.commit_delay must be positive");
  if (cloud_capacity == 0) bad("sim.cloud_capacity must be positive");
  if (!(yaw_rate > 0.0)) bad("sim.yaw_rate must be positive");
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Timeout: return "timeout";
    case Outcome::Collision: return "collision";
  }
  return "unknown";
}

bool committed_clear(const primitives::JerkPrimitive& prim, const map::SlidingGrid& grid,
                     double r, double z_min, double z_max) {
  for (const Vec3& p : collision::sample_path(prim, 0.25 * grid.voxel_size())) {
    if (p.z() < z_min - 1e-9 || p.z() > z_max + 1e-9) return false;
    if (!collision::point_clear_radius(grid, p, r)) return false;
  }
  return true;
}

int room_reversals(const World& world, const std::vector<VehicleRecord>& vehicle) {
  int count = 0;
  for (const auto& room : world.rooms) {
    bool inside = false;
    Vec3 v_in = Vec3::Zero();
    for (std::size_t i = 0; i < vehicle.size(); ++i) {
      const Vec3& p = vehicle[i].state.pos;
      const bool now = room.contains(p.x(), p.y());
      if (now && !inside) v_in = vehicle[i].state.vel;
      if (!now && inside) {
        const Vec3& v_out = vehicle[i].state.vel;
        if (v_in.head<2>().dot(v_out.head<2>()) < 0.0) {
          ++count;
          break;
        }
      }
      inside = now;
    }
  }
  return count;
}

EpisodeResult run_episode(const World& world, const EpisodeConfig& cfg) {
  cfg.validate();
  EpisodeResult res;
  RunMetrics& m = res.metrics;
  EpisodeTrace& tr = res.trace;

  map::SlidingGrid grid(world.start, Vec3(cfg.map.side_xy, cfg.map.side_xy, cfg.map.side_z),
                        cfg.map.voxel);
  if (cfg.map.start_bubble > 0.0) {
    const double s = cfg.map.voxel;
    const int reach = static_cast<int>(std::ceil(cfg.map.start_bubble / s));
    const Index3 c = grid.voxel_of(world.start);
    for (int dz = -reach; dz <= reach; ++dz)
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx) {
          const Index3 i = c + Index3{dx, dy, dz};
          if (grid.in_bounds(i) && (grid.voxel_center(i) - world.start).norm() <= cfg.map.start_bubble) {
            grid.set_state(i, map::VoxelState::Free);
          }
        }
  }

  replan::SnapshotOptions sopts;
  sopts.r_drone = cfg.replan.r_drone;
  sopts.margin_voxels = cfg.map.margin_voxels;
  sopts.z_min = cfg.map.z_min;
  sopts.z_max = cfg.map.z_max;
  auto publish = [&]() {
    return replan::make_snapshot(std::make_shared<const map::SlidingGrid>(grid), sopts);
  };
  replan::MapSnapshot snapshot = publish();
  collision::CloudBuffer clouds(cfg.cloud_capacity);
  replan::CommittedTrajectory committed(primitives::FlatState::at_rest(world.start));
  replan::ReplanState rstate;

  const Vec3 to_goal = world.goal - world.start;
  double yaw = std::atan2(to_goal.y(), to_goal.x());
  double yaw_target = yaw;

  const double eps = 1e-9;
  double next_sensor = 0.0;
  double next_fusion = 0.0;
  double next_replan = 0.0;
  std::uint64_t scan_id = 0;
  std::optional<map::DepthScan> latest_scan;
  std::uint64_t latest_id = 0;
  int fusion_k = 0;
  double commit_delay = cfg.commit_delay;

  m.min_clearance = std::numeric_limits<double>::infinity();
  const auto n_steps = static_cast<long>(std::ceil(cfg.timeout / cfg.dt));
  double prev_speed = 0.0;
  m.outcome = Outcome::Timeout;
  for (long step = 0; step <= n_steps; ++step) {
    const double t = static_cast<double>(step) * cfg.dt;
    const primitives::FlatState st = committed.sample(t);
    const double speed = st.vel.norm();
    if (step > 0) m.path_length += 0.5 * (prev_speed + speed) * cfg.dt;
    prev_speed = speed;

    const double dyaw = wrap_angle(yaw_target - yaw);
    const double max_turn = cfg.yaw_rate * cfg.dt;
    yaw = wrap_angle(yaw + std::clamp(dyaw, -max_turn, max_turn));

    const double clearance = world.distance(st.pos);
    m.min_clearance = std::min(m.min_clearance, clearance);
    m.flight_time = t;
    m.final_position = st.pos;
    if (cfg.record_vehicle) tr.vehicle.push_back({t, st, yaw, clearance});
    if (clearance < cfg.replan.r_drone) {
      m.outcome = Outcome::Collision;
      break;
    }
    if ((st.pos - world.goal).norm() < cfg.goal_tolerance) {
      m.outcome = Outcome::Success;
      break;
    }

    if (t + eps >= next_sensor) {
      next_sensor += 1.0 / cfg.sensor.rate_hz;
      latest_scan = render_depth(world, st.pos, yaw, cfg.sensor);
      latest_id = ++scan_id;
      clouds.push_cloud(latest_scan->points, latest_id);
    }

    if (t + eps >= next_fusion) {
      next_fusion += 1.0 / cfg.map.rate_hz;
      if (latest_scan) {
        grid.slide_to(st.pos);
        FusionRecord fr;
        fr.k = fusion_k++;
        fr.t = t;
        fr.scan_id = latest_id;
        fr.hits = latest_scan->points.size();
        fr.max_range_rays = latest_scan->max_range_dirs.size();
        fr.fuse_ms = 1e3 * grid.fuse_scan(*latest_scan).count();
        fr.map_stamp = grid.stamp();
        clouds.advance_watermark(latest_id);
        snapshot = publish();
        tr.fusions.push_back(fr);
      }
    }

    if (t + eps >= next_replan) {
      next_replan += 1.0 / cfg.replan_rate_hz;
      const double t_a = t + commit_delay;
      const primitives::FlatState a = committed.sample(t_a);
      replan::ReplanInputs in{&snapshot, &clouds};
      const int k = rstate.k;
      const replan::ReplanOutcome out = replan::replan(a, world.goal, in, cfg.replan, rstate);

      ReplanRecord rr;
      rr.k = k;
      rr.t = t;
      rr.commit_delay = commit_delay;
      rr.success = out.success;
      rr.failure = out.failure;
      rr.timings = out.timings;
      rr.J1 = out.J1;
      rr.J2 = out.J2;
      rr.branch = out.chosen_branch;
      rr.gate_open = out.gate_open;
      rr.angle_deg = out.angle * 180.0 / M_PI;
      rr.r_a = out.r_a;
      rr.r_b = out.r_b;
      rr.n_qp_solves = out.n_qp_solves;
      rr.n_vel_solves = out.n_vel_solves;
      for (double v : out.jerk_solve_ms) rr.jerk_solve_ms += v;
      for (double v : out.vel_solve_ms) rr.vel_solve_ms += v;
      rr.map_stamp = snapshot.stamp();
      rr.buffered_clouds = clouds.size();
      rr.nn_queries = out.clearance.nn_queries;
      rr.A = a.pos;
      rr.G = out.G;
      rr.B = out.B;
      rr.Bp = out.Bp;
      tr.replans.push_back(rr);
      tr.jerk_solve_ms.insert(tr.jerk_solve_ms.end(), out.jerk_solve_ms.begin(),
                              out.jerk_solve_ms.end());
      tr.vel_solve_ms.insert(tr.vel_solve_ms.end(), out.vel_solve_ms.begin(),
                             out.vel_solve_ms.end());
      if (cfg.record_paths) {
        if (out.jps1) tr.paths.push_back({k, 1, out.jps1->waypoints});
        if (out.jps2) tr.paths.push_back({k, 2, out.jps2->waypoints});
      }
      ++m.replans;
      if (out.success) {
        if (!committed_clear(out.chosen_prim, *snapshot.grid, cfg.replan.r_drone, cfg.map.z_min,
                             cfg.map.z_max)) {
          ++m.commit_violations;
        }
        committed.commit(out.chosen_prim, t_a);
        committed.prune_before(t);
        const Vec3 look = out.Bp - a.pos;
        if (look.head<2>().norm() > 1e-6) yaw_target = std::atan2(look.y(), look.x());
      } else {
        ++m.replan_failures;
        // Keep looking along the optimistic path so the sensor can clear it.
        if (out.jps1 && out.jps1->size() >= 2) {
          const Vec3 look =
              search::first_sphere_intersection(*out.jps1, a.pos, std::max(out.r_a, 1e-3)).point -
              a.pos;
          if (look.head<2>().norm() > 1e-6) yaw_target = std::atan2(look.y(), look.x());
        }
      }
      if (cfg.commit_mode == CommitMode::Adaptive) {
        // Next commit point must lie beyond the time the replan may take.
        const double period = 1.0 / cfg.replan_rate_hz;
        commit_delay = std::max(cfg.commit_delay,
                                std::min(period * std::ceil(2e-3 * out.timings.total_ms / period),
                                         4.0 * period));
      }
    }
  }
  m.success = m.outcome == Outcome::Success;
  return res;
}

}  // namespace mfp::sim
