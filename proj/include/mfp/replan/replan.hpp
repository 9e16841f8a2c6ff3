#pragma once

#include "mfp/collision/clearance.hpp"
#include "mfp/primitives/primitives.hpp"
#include "mfp/replan/committed.hpp"
#include "mfp/replan/snapshot.hpp"
#include "mfp/search/grid_path.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mfp::replan {

struct ReplanConfig {
  double R_a_min = 1.0;
  double R_a_max = 4.0;
  double R_b = 7.0;
  /// Retry get_primj at R_a_min when no terminal is feasible at the nominal radius.
  bool shrink_on_fail = true;
  double alpha0 = 15.0 * M_PI / 180.0;
  int samples_total = 30;
  double arc_step = 10.0 * M_PI / 180.0;
  std::vector<double> ring_offsets{10.0 * M_PI / 180.0, 20.0 * M_PI / 180.0};
  int ring_points = 8;
  double r_drone = 0.3;
  primitives::Limits limits;
  primitives::JerkOptions jerk;
  primitives::VelOptions vel;

  /// Throws PlanningError(InvalidArgument) on inconsistent values.
  void validate() const;
};

struct ReplanState {
  int k = 0;
  std::optional<search::GridPath> prev_jps;
  std::optional<Vec3> prev_Bp;
};

/// Wall-clock stage durations of one replan, milliseconds.
struct StageTimings {
  double goal_ms = 0.0;
  double jps_ms = 0.0;
  double cvx_jerk_ms = 0.0;
  double cvx_vel_ms = 0.0;
  double collision_ms = 0.0;
  double total_ms = 0.0;
};

struct ReplanOutcome {
  bool success = false;
  std::string failure;  // empty on success
  primitives::JerkPrimitive chosen_prim;
  int chosen_branch = 0;
  double J1 = std::numeric_limits<double>::quiet_NaN();
  double J2 = std::numeric_limits<double>::infinity();
  bool gate_open = false;
  double angle = 0.0;
  double r_a = 0.0;
  double r_b = 0.0;
  Vec3 G = Vec3::Zero();
  Vec3 B = Vec3::Zero();
  Vec3 Bp = Vec3::Zero();
  std::optional<search::GridPath> jps1;
  std::optional<search::GridPath> jps2;
  int n_qp_solves = 0;
  int n_vel_solves = 0;
  std::vector<double> jerk_solve_ms;
  std::vector<double> vel_solve_ms;
  collision::ClearanceStats clearance;
  StageTimings timings;
};

/// Everything a replan reads; all views are immutable for its duration.
struct ReplanInputs {
  const MapSnapshot* map = nullptr;
  const collision::CloudBuffer* clouds = nullptr;
};

/// Accumulates stage times and solver counts while a replan runs.
struct ReplanContext {
  const ReplanConfig* cfg = nullptr;
  ReplanInputs in;
  ReplanOutcome* out = nullptr;
};

struct PrimjResult {
  primitives::JerkPrimitive prim;
  Vec3 B = Vec3::Zero();
  Vec3 Bp = Vec3::Zero();
  std::size_t r_idx = 0;
  int accepted_index = -1;
};

/// Angle at A between rays A->b1 and A->b_prev.
double angle_between(const Vec3& b1, const Vec3& a, const Vec3& b_prev);

/// Candidate terminal positions on the sphere of radius r_a around a.
std::vector<Vec3> sample_points(const Vec3& bp, const search::GridPath& path, std::size_t r_idx,
                                const Vec3& a, double r_a, const ReplanConfig& cfg);

/// First sample of the queue whose jerk primitive from `a` is clear.
/// Throws PlanningError(NoFeasibleTerminal) when the queue is exhausted.
PrimjResult get_primj(const search::GridPath& path, const primitives::FlatState& a, double r_a,
                      ReplanContext& ctx);

/// Previous path repaired through its first/last blocked crossings.
/// nullopt when any sub-search fails.
std::optional<search::GridPath> build_jps2(const search::GridPath& prev, const MapSnapshot& map,
                                           const Vec3& a, const Vec3& g, ReplanContext* ctx = nullptr);

/// Three-fidelity cost of a branch; +inf when the velocity chain fails.
double get_cost(const PrimjResult& pj, const search::GridPath& path, const Vec3& a, double r_b,
                ReplanContext& ctx);

/// One replanning iteration from committed state `a` toward `g_term`.
ReplanOutcome replan(const primitives::FlatState& a, const Vec3& g_term, const ReplanInputs& in,
                     const ReplanConfig& cfg, ReplanState& state);

/// Variant that always evaluates both branches when a previous path exists
/// (used to check the gate decision offline).
ReplanOutcome replan_force_both(const primitives::FlatState& a, const Vec3& g_term,
                                const ReplanInputs& in, const ReplanConfig& cfg,
                                ReplanState& state);

}  // namespace mfp::replan
