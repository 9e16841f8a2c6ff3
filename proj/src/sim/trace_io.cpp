#include "mfp/sim/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>

namespace mfp::sim {

Aggregate aggregate(const std::vector<double>& v) {
  Aggregate a;
  a.count = v.size();
  if (v.empty()) return a;
  a.avg = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - a.avg) * (x - a.avg);
  a.std = std::sqrt(ss / static_cast<double>(v.size()));
  a.min = *std::min_element(v.begin(), v.end());
  a.max = *std::max_element(v.begin(), v.end());
  return a;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::json to_json(const Aggregate& a) {
  return {{"count", a.count}, {"avg", a.avg}, {"std", a.std}, {"min", a.min}, {"max", a.max}};
}

StageReport stage_report(const std::vector<ReplanRecord>& replans) {
  StageReport r;
  r.replans = replans.size();
  if (replans.empty()) return r;
  std::vector<double> total;
  std::vector<double> jps;
  for (const auto& x : replans) {
    r.goal_ms += x.timings.goal_ms;
    r.jps_ms += x.timings.jps_ms;
    r.cvx_jerk_ms += x.timings.cvx_jerk_ms;
    r.cvx_vel_ms += x.timings.cvx_vel_ms;
    r.collision_ms += x.timings.collision_ms;
    r.total_ms += x.timings.total_ms;
    total.push_back(x.timings.total_ms);
    jps.push_back(x.timings.jps_ms);
  }
  r.jps_share = r.total_ms > 0.0 ? r.jps_ms / r.total_ms : 0.0;
  const double n = static_cast<double>(replans.size());
  r.goal_ms /= n;
  r.jps_ms /= n;
  r.cvx_jerk_ms /= n;
  r.cvx_vel_ms /= n;
  r.collision_ms /= n;
  r.total_ms /= n;
  r.total_median_ms = median(total);
  r.jps_median_ms = median(jps);
  return r;
}

nlohmann::json to_json(const StageReport& r) {
  return {{"replans", r.replans},           {"goal_ms", r.goal_ms},
          {"jps_ms", r.jps_ms},             {"cvx_jerk_ms", r.cvx_jerk_ms},
          {"cvx_vel_ms", r.cvx_vel_ms},     {"collision_ms", r.collision_ms},
          {"total_ms", r.total_ms},         {"total_median_ms", r.total_median_ms},
          {"jps_median_ms", r.jps_median_ms}, {"jps_share", r.jps_share}};
}

nlohmann::json summary_json(const World& world, const EpisodeResult& res) {
  const RunMetrics& m = res.metrics;
  nlohmann::json j;
  j["world"] = world.name;
  j["seed"] = world.seed;
  j["obstacles"] = world.obstacle_count();
  j["outcome"] = to_string(m.outcome);
  j["success"] = m.success;
  j["path_length"] = m.path_length;
  j["flight_time"] = m.flight_time;
  j["min_clearance"] = std::isfinite(m.min_clearance) ? nlohmann::json(m.min_clearance)
                                                      : nlohmann::json(nullptr);
  j["replans"] = m.replans;
  j["replan_failures"] = m.replan_failures;
  j["commit_violations"] = m.commit_violations;
  j["final_position"] = {m.final_position.x(), m.final_position.y(), m.final_position.z()};
  j["room_reversals"] = room_reversals(world, res.trace.vehicle);
  j["stages"] = to_json(stage_report(res.trace.replans));
  j["jerk_solve_ms"] = to_json(aggregate(res.trace.jerk_solve_ms));
  j["vel_solve_ms"] = to_json(aggregate(res.trace.vel_solve_ms));
  return j;
}

const std::vector<std::string>& timing_columns() {
  static const std::vector<std::string> cols = {"goal_ms",      "jps_ms",        "cvx_jerk_ms",
                                                "cvx_vel_ms",   "collision_ms",  "total_ms",
                                                "jerk_solve_ms", "vel_solve_ms"};
  return cols;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << std::setprecision(17);
  return os;
}

}  // namespace

void write_traces(const std::string& dir, const World& world, const EpisodeResult& res,
                  const nlohmann::json& extra) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path d(dir);

  {
    auto os = open_csv(d / "replan.csv");
    os << "k,t,success,failure,goal_ms,jps_ms,cvx_jerk_ms,cvx_vel_ms,collision_ms,total_ms,"
          "J1,J2,branch,gate_open,angle_deg,r_a,r_b,n_qp_solves,n_vel_solves,jerk_solve_ms,"
          "vel_solve_ms,map_stamp,buffered_clouds,nn_queries,commit_delay,Ax,Ay,Az,Gx,Gy,Gz,Bx,By,"
          "Bz,Bpx,Bpy,Bpz\n";
    for (const auto& r : res.trace.replans) {
      os << r.k << ',' << r.t << ',' << r.success << ',' << r.failure << ',' << r.timings.goal_ms
         << ',' << r.timings.jps_ms << ',' << r.timings.cvx_jerk_ms << ','
         << r.timings.cvx_vel_ms << ',' << r.timings.collision_ms << ',' << r.timings.total_ms
         << ',' << r.J1 << ',' << r.J2 << ',' << r.branch << ',' << r.gate_open << ','
         << r.angle_deg << ',' << r.r_a << ',' << r.r_b << ',' << r.n_qp_solves << ','
         << r.n_vel_solves << ',' << r.jerk_solve_ms << ',' << r.vel_solve_ms << ','
         << r.map_stamp << ',' << r.buffered_clouds << ',' << r.nn_queries << ','
         << r.commit_delay;
      for (const Vec3* v : {&r.A, &r.G, &r.B, &r.Bp}) {
        os << ',' << v->x() << ',' << v->y() << ',' << v->z();
      }
      os << '\n';
    }
  }
  {
    auto os = open_csv(d / "vehicle.csv");
    os << "t,x,y,z,vx,vy,vz,ax,ay,az,yaw,clearance\n";
    for (const auto& v : res.trace.vehicle) {
      const auto& s = v.state;
      os << v.t << ',' << s.pos.x() << ',' << s.pos.y() << ',' << s.pos.z() << ',' << s.vel.x()
         << ',' << s.vel.y() << ',' << s.vel.z() << ',' << s.acc.x() << ',' << s.acc.y() << ','
         << s.acc.z() << ',' << v.yaw << ',' << v.clearance << '\n';
    }
  }
  {
    auto os = open_csv(d / "fusion.csv");
    os << "k,t,scan_id,map_stamp,fuse_ms,hits,max_range_rays\n";
    for (const auto& f : res.trace.fusions) {
      os << f.k << ',' << f.t << ',' << f.scan_id << ',' << f.map_stamp << ',' << f.fuse_ms << ','
         << f.hits << ',' << f.max_range_rays << '\n';
    }
  }
  {
    auto os = open_csv(d / "jps_paths.csv");
    os << "k,branch,wp_index,x,y,z\n";
    for (const auto& p : res.trace.paths) {
      for (std::size_t i = 0; i < p.points.size(); ++i) {
        os << p.k << ',' << p.branch << ',' << i << ',' << p.points[i].x() << ','
           << p.points[i].y() << ',' << p.points[i].z() << '\n';
      }
    }
  }
  nlohmann::json j = summary_json(world, res);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  std::ofstream os(d / "summary.json");
  if (!os) throw std::runtime_error("cannot write summary.json");
  os << std::setw(2) << j << '\n';
}

}  // namespace mfp::sim
