#include "mfp/replan/replan.hpp"

#include "mfp/search/jps.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <chrono>
#include <sstream>

namespace mfp::replan {

using primitives::FlatState;
using search::GridPath;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Adds the scope's wall time to `acc` (milliseconds).
class StageTimer {
 public:
  explicit StageTimer(double* acc) : acc_(acc), t0_(Clock::now()) {}
  ~StageTimer() {
    if (acc_) *acc_ += ms_since(t0_);
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  double* acc_;
  Clock::time_point t0_;
};

Vec3 on_sphere(const Vec3& p, const Vec3& a, double r) {
  const Vec3 d = p - a;
  const double n = d.norm();
  if (n < 1e-12) return a + Vec3(r, 0, 0);
  return a + d * (r / n);
}

// Unit vectors completing d to a right-handed frame, e1 horizontal when possible.
void frame(const Vec3& d, Vec3& e1, Vec3& e2) {
  e1 = Vec3::UnitZ().cross(d);
  if (e1.norm() < 1e-9) e1 = Vec3::UnitX().cross(d);
  e1.normalize();
  e2 = d.cross(e1).normalized();
}

void append_arc(std::vector<Vec3>& out, const Vec3& a, double r, const Vec3& from, const Vec3& to,
                double step) {
  const Vec3 u = (from - a).normalized();
  const Vec3 w = (to - a).normalized();
  const double theta = std::acos(std::clamp(u.dot(w), -1.0, 1.0));
  if (theta < 1e-9) return;
  Vec3 perp;
  if (theta > M_PI - 1e-9) {
    Vec3 e2;
    frame(u, perp, e2);
  } else {
    perp = (w - u * u.dot(w)).normalized();
  }
  const int m = std::max(1, static_cast<int>(std::ceil(theta / step - 1e-9)));
  for (int k = 1; k <= m; ++k) {
    const double phi = theta * k / m;
    out.push_back(a + r * (std::cos(phi) * u + std::sin(phi) * perp));
  }
}

std::optional<GridPath> jps_or_none(const search::OccupancyMask& mask, const Vec3& s,
                                    const Vec3& g) {
  try {
    return search::jps_search(mask, s, g);
  } catch (const PlanningError& e) {
    if (e.code() == PlanningError::Code::OutOfBounds) return std::nullopt;
    throw;
  }
}

// A committed start can end up inside the dilated set once the map grows
// around it. The primitive may leave that set along samples that stay in the
// band and keep r_drone from every non-Free voxel centre; the rest must pass
// the mask test.
bool clear_from_blocked_start(const primitives::JerkPrimitive& prim, const MapSnapshot& map,
                              const collision::CloudBuffer& clouds, double r_drone,
                              collision::ClearanceStats* stats) {
  const std::vector<Vec3> pts = collision::sample_path(prim, 0.5 * map.safe.voxel_size());
  std::size_t i = 0;
  for (; i < pts.size() && map.safe.blocked_at(pts[i]); ++i) {
    if (stats) ++stats->samples;
    const int z = map.grid->voxel_of(pts[i]).z;
    if (z < map.band_layers.first || z > map.band_layers.second) return false;
    if (!collision::point_clear_radius(*map.grid, pts[i], r_drone)) return false;
    if (stats) ++stats->nn_queries;
    if (clouds.any_within(pts[i], r_drone)) return false;
  }
  return collision::points_clear({pts.begin() + static_cast<std::ptrdiff_t>(i), pts.end()},
                                 map.safe, clouds, r_drone, stats);
}

void append_path(GridPath& dst, const GridPath& src) {
  for (const Vec3& p : src.waypoints) {
    if (!dst.waypoints.empty() && (dst.waypoints.back() - p).norm() < 1e-9) continue;
    dst.waypoints.push_back(p);
  }
}

ReplanOutcome run_replan(const FlatState& a, const Vec3& g_term, const ReplanInputs& in,
                         const ReplanConfig& cfg, ReplanState& state, bool force_both) {
  const auto t_start = Clock::now();
  ReplanOutcome out;
  ReplanContext ctx{&cfg, in, &out};
  ++state.k;

  auto finish = [&](const std::string& failure) {
    out.success = failure.empty();
    out.failure = failure;
    out.timings.total_ms = ms_since(t_start);
    return out;
  };

  const MapSnapshot& map = *in.map;
  try {
    StageTimer t(&out.timings.goal_ms);
    out.G = map.grid->project_goal(a.pos, g_term, map.band_layers);
  } catch (const PlanningError& e) {
    return finish(std::string("goal: ") + e.what());
  }

  {
    StageTimer t(&out.timings.jps_ms);
    out.jps1 = jps_or_none(map.jps, a.pos, out.G);
  }
  if (!out.jps1) return finish("NoPath");
  const GridPath& jps1 = *out.jps1;

  const double ag = (out.G - a.pos).norm();
  const double aq2 = (jps1.waypoints[1] - a.pos).norm();
  out.r_a = std::min(std::clamp(aq2, cfg.R_a_min, cfg.R_a_max), ag);
  out.r_b = std::min(cfg.R_b, ag);

  PrimjResult pj1;
  try {
    pj1 = get_primj(jps1, a, out.r_a, ctx);
  } catch (const PlanningError& e) {
    if (e.code() != PlanningError::Code::NoFeasibleTerminal) throw;
    const double r_min = std::min(cfg.R_a_min, ag);
    if (!cfg.shrink_on_fail || out.r_a <= r_min + 1e-9) return finish("NoFeasibleTerminal");
    out.r_a = r_min;
    try {
      pj1 = get_primj(jps1, a, out.r_a, ctx);
    } catch (const PlanningError& e2) {
      if (e2.code() != PlanningError::Code::NoFeasibleTerminal) throw;
      return finish("NoFeasibleTerminal");
    }
  }
  out.chosen_prim = pj1.prim;
  out.chosen_branch = 1;
  out.B = pj1.B;
  out.Bp = pj1.Bp;

  const GridPath* chosen_path = &jps1;
  Vec3 chosen_bp = pj1.Bp;
  if (state.prev_jps && state.prev_Bp) {
    out.angle = angle_between(pj1.Bp, a.pos, *state.prev_Bp);
    out.gate_open = force_both || out.angle > cfg.alpha0;
  }
  if (out.gate_open) {
    {
      StageTimer t(&out.timings.jps_ms);
      out.jps2 = build_jps2(*state.prev_jps, map, a.pos, out.G, &ctx);
    }
    out.J1 = get_cost(pj1, jps1, a.pos, out.r_b, ctx);
    out.J2 = std::numeric_limits<double>::infinity();
    std::optional<PrimjResult> pj2;
    if (out.jps2) {
      try {
        pj2 = get_primj(*out.jps2, a, out.r_a, ctx);
        out.J2 = get_cost(*pj2, *out.jps2, a.pos, out.r_b, ctx);
      } catch (const PlanningError& e) {
        if (e.code() != PlanningError::Code::NoFeasibleTerminal) throw;
      }
    }
    if (pj2 && out.J2 < out.J1) {
      out.chosen_branch = 2;
      out.chosen_prim = pj2->prim;
      out.B = pj2->B;
      out.Bp = pj2->Bp;
      chosen_path = &*out.jps2;
      chosen_bp = pj2->Bp;
    }
  }
  state.prev_jps = *chosen_path;
  state.prev_Bp = chosen_bp;
  return finish("");
}

}  // namespace

void ReplanConfig::validate() const {
  auto fail = [](const std::string& m) {
    throw PlanningError(PlanningError::Code::InvalidArgument, m);
  };
  if (!(R_a_min > 0.0)) fail("R_a_min must be > 0");
  if (!(R_a_max > R_a_min)) fail("R_a_max must exceed R_a_min");
  if (!(R_b > R_a_max)) fail("R_b must exceed R_a_max");
  if (!(alpha0 > 0.0)) fail("alpha0 must be > 0");
  if (samples_total < 1) fail("samples_total must be >= 1");
  if (!(arc_step > 0.0)) fail("arc_step must be > 0");
  if (ring_points < 1) fail("ring_points must be >= 1");
  if (!(r_drone >= 0.0)) fail("r_drone must be >= 0");
  if (!(limits.v_max > 0.0 && limits.a_max > 0.0 && limits.j_max > 0.0)) fail("limits must be > 0");
  if (jerk.N < 2 || vel.N < 1) fail("N_jerk must be >= 2 and N_vel >= 1");
  if (!(jerk.gamma > 1.0 && vel.gamma > 1.0)) fail("gamma_dt must be > 1");
  if (!(jerk.dt_min > 0.0 && vel.dt_min > 0.0)) fail("dt_min must be > 0");
  if ((jerk.Q.diag.array() < 0.0).any()) fail("Q diagonal must be >= 0");
}

double angle_between(const Vec3& b1, const Vec3& a, const Vec3& b_prev) {
  const Vec3 u = b1 - a;
  const Vec3 v = b_prev - a;
  const double nu = u.norm(), nv = v.norm();
  if (nu < 1e-12 || nv < 1e-12) return 0.0;
  return std::acos(std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0));
}

std::vector<Vec3> sample_points(const Vec3& bp_in, const GridPath& path, std::size_t r_idx,
                                const Vec3& a, double r_a, const ReplanConfig& cfg) {
  if (r_a < 1e-9) return {bp_in};
  const Vec3 bp = on_sphere(bp_in, a, r_a);
  std::vector<Vec3> q{bp};
  // Arcs B' -> P_{q_{r-1}} -> ... -> P_{q_2} (waypoints 1 .. r_idx-1, 0-based).
  Vec3 from = bp;
  const std::size_t last = std::min(r_idx, path.size());
  for (std::size_t j = last; j-- > 1;) {
    if ((path.waypoints[j] - a).norm() < 1e-9) continue;
    const Vec3 to = on_sphere(path.waypoints[j], a, r_a);
    append_arc(q, a, r_a, from, to, cfg.arc_step);
    from = to;
  }
  // Concentric rings around A->B'.
  const Vec3 d = (bp - a).normalized();
  Vec3 e1, e2;
  frame(d, e1, e2);
  auto ring = [&](double off) {
    for (int k = 0; k < cfg.ring_points; ++k) {
      const double psi = 2.0 * M_PI * k / cfg.ring_points;
      const Vec3 dir = std::cos(off) * d + std::sin(off) * (std::cos(psi) * e1 + std::sin(psi) * e2);
      q.push_back(a + r_a * dir.normalized());
    }
  };
  for (double off : cfg.ring_offsets) ring(off);
  double off = cfg.ring_offsets.empty() ? 0.0 : cfg.ring_offsets.back();
  const double ring_step = cfg.ring_offsets.size() >= 2
                               ? cfg.ring_offsets[1] - cfg.ring_offsets[0]
                               : (cfg.ring_offsets.empty() ? cfg.arc_step : cfg.ring_offsets[0]);
  while (static_cast<int>(q.size()) < cfg.samples_total && off + ring_step < M_PI) {
    off += ring_step;
    ring(off);
  }
  if (static_cast<int>(q.size()) > cfg.samples_total) q.resize(static_cast<std::size_t>(cfg.samples_total));
  return q;
}

PrimjResult get_primj(const GridPath& path, const FlatState& a, double r_a, ReplanContext& ctx) {
  const ReplanConfig& cfg = *ctx.cfg;
  ReplanOutcome& out = *ctx.out;
  const MapSnapshot& map = *ctx.in.map;
  const search::PathPoint bp = search::first_sphere_intersection(path, a.pos, r_a);

  PrimjResult res;
  res.Bp = bp.point;
  res.r_idx = bp.next_index;
  const std::vector<Vec3> queue = sample_points(bp.point, path, bp.next_index, a.pos, r_a, cfg);
  const bool start_blocked = map.safe.blocked_at(a.pos);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const Vec3& b = queue[i];
    {
      // The primitive ends at b, so a blocked b can never pass.
      StageTimer t(&out.timings.collision_ms);
      if (map.safe.blocked_at(b)) continue;
    }
    primitives::JerkPrimitive prim;
    {
      const auto t0 = Clock::now();
      bool ok = true;
      try {
        prim = primitives::solve_jerk(a, FlatState::at_rest(b), cfg.limits, cfg.jerk);
      } catch (const PlanningError& e) {
        if (e.code() != PlanningError::Code::MaxIterations) throw;
        ok = false;
      }
      const double ms = ms_since(t0);
      out.timings.cvx_jerk_ms += ms;
      out.jerk_solve_ms.push_back(ms);
      ++out.n_qp_solves;
      if (!ok) continue;
    }
    bool clear;
    {
      StageTimer t(&out.timings.collision_ms);
      clear = start_blocked ? clear_from_blocked_start(prim, map, *ctx.in.clouds, cfg.r_drone,
                                                       &out.clearance)
                            : collision::primitive_clear(prim, map.safe, *ctx.in.clouds,
                                                         cfg.r_drone, &out.clearance);
    }
    if (clear) {
      res.prim = std::move(prim);
      res.B = b;
      res.accepted_index = static_cast<int>(i);
      return res;
    }
  }
  throw PlanningError(PlanningError::Code::NoFeasibleTerminal, "all sampled terminal points rejected");
}

std::optional<GridPath> build_jps2(const GridPath& prev, const MapSnapshot& map, const Vec3& a,
                                   const Vec3& g, ReplanContext*) {
  auto span = search::path_blocked_span(prev, map.jps);
  if (!span) return prev;
  // Step just outside the blocked run so the sub-search endpoints are free.
  const double eps = 0.25 * map.jps.voxel_size();
  auto nudge = [&](search::PathParam p, double dir) {
    if (p.segment + 1 < prev.size()) {
      const double len = (prev.waypoints[p.segment + 1] - prev.waypoints[p.segment]).norm();
      if (len > 0.0) p.t = std::clamp(p.t + dir * eps / len, 0.0, 1.0);
    }
    return search::point_at(prev, p);
  };
  const Vec3 i1 = nudge(span->first, -1.0);
  const Vec3 i2 = nudge(span->second, +1.0);
  auto p1 = jps_or_none(map.jps, a, i1);
  if (!p1) return std::nullopt;
  auto p2 = jps_or_none(map.jps, i1, i2);
  if (!p2) return std::nullopt;
  auto p3 = jps_or_none(map.jps, i2, g);
  if (!p3) return std::nullopt;
  GridPath out;
  append_path(out, *p1);
  append_path(out, *p2);
  append_path(out, *p3);
  if (out.size() == 1) out.waypoints.push_back(out.waypoints.front());
  return out;
}

double get_cost(const PrimjResult& pj, const GridPath& path, const Vec3& a, double r_b,
                ReplanContext& ctx) {
  const ReplanConfig& cfg = *ctx.cfg;
  ReplanOutcome& out = *ctx.out;
  const search::PathPoint c = search::last_sphere_intersection(path, a, r_b);
  std::vector<Vec3> chain{pj.B};
  for (const Vec3& w : search::intermediate_waypoints(path, pj.r_idx, c.next_index)) chain.push_back(w);
  chain.push_back(c.point);
  std::vector<Vec3> tail;
  if (!c.inside) tail.assign(path.waypoints.begin() + static_cast<std::ptrdiff_t>(c.next_index),
                             path.waypoints.end());

  std::vector<primitives::VelPrimitive> vel;
  const auto t0 = Clock::now();
  try {
    vel = primitives::solve_velocity_chain(chain, cfg.limits.v_max, cfg.vel);
  } catch (const PlanningError& e) {
    if (e.code() != PlanningError::Code::MaxIterations) throw;
    out.timings.cvx_vel_ms += ms_since(t0);
    return std::numeric_limits<double>::infinity();
  }
  const double ms = ms_since(t0);
  out.timings.cvx_vel_ms += ms;
  out.n_vel_solves += static_cast<int>(vel.size());
  for (std::size_t i = 0; i < vel.size(); ++i) out.vel_solve_ms.push_back(ms / vel.size());
  return primitives::cost_jerk(pj.prim, cfg.limits.j_max) +
         primitives::cost_velocity(vel, cfg.limits.v_max) +
         primitives::cost_distance(c.point, tail, cfg.limits.v_max);
}

ReplanOutcome replan(const FlatState& a, const Vec3& g_term, const ReplanInputs& in,
                     const ReplanConfig& cfg, ReplanState& state) {
  return run_replan(a, g_term, in, cfg, state, false);
}

ReplanOutcome replan_force_both(const FlatState& a, const Vec3& g_term, const ReplanInputs& in,
                                const ReplanConfig& cfg, ReplanState& state) {
  return run_replan(a, g_term, in, cfg, state, true);
}

}  // namespace mfp::replan
