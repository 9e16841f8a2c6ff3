#pragma once

#include "mfp/types.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace mfp::primitives {

struct FlatState {
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 acc = Vec3::Zero();

  static FlatState at_rest(const Vec3& p) { return {p, Vec3::Zero(), Vec3::Zero()}; }
  bool finite() const { return pos.allFinite() && vel.allFinite() && acc.allFinite(); }
};

struct Limits {
  double v_max = 2.5;
  double a_max = 5.0;
  double j_max = 30.0;
};

/// Diagonal terminal weight, ordered [pos xyz, vel xyz, acc xyz].
struct TerminalWeight {
  Eigen::Matrix<double, 9, 1> diag;

  static TerminalWeight uniform(double q_pos, double q_vel, double q_acc);
  static TerminalWeight defaults() { return uniform(1e6, 1e5, 1e4); }
};

struct JerkOptions {
  int N = 10;
  double gamma = 1.25;
  int max_growth = 50;
  double dt_min = 1e-3;
  double kkt_tol = 1e-6;
  /// Terminal error tolerances that define a converged dt.
  double pos_tol = 0.05;
  double vel_tol = 0.05;
  double acc_tol = 0.1;
  TerminalWeight Q = TerminalWeight::defaults();
};

struct VelOptions {
  int N = 10;
  double gamma = 1.25;
  int max_growth = 50;
  double dt_min = 1e-3;
  double kkt_tol = 1e-6;
};

/// Jerk-controlled (triple integrator) primitive with piecewise constant input.
struct JerkPrimitive {
  FlatState x0;
  std::vector<Vec3> inputs;
  double dt = 0.0;
  int N = 0;
  FlatState terminal;
  /// States at the step boundaries, knots[0] = x0, knots[N] = terminal.
  std::vector<FlatState> knots;
  /// Sum over axes of u'u + e'Qe at the solution.
  double objective = 0.0;
  double kkt_residual = 0.0;
  double dt0 = 0.0;
  int dt_iterations = 0;
  int qp_iterations = 0;

  double duration() const { return dt * N; }
};

/// Velocity-controlled (single integrator) primitive.
struct VelPrimitive {
  Vec3 p0 = Vec3::Zero();
  Vec3 pf = Vec3::Zero();
  std::vector<Vec3> inputs;
  double dt = 0.0;
  int N = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;

  double duration() const { return dt * N; }
};

/// Exact triple-integrator propagation for `tau` seconds under constant jerk u.
FlatState propagate(const FlatState& x, const Vec3& u, double tau);

/// Per-axis time bound under v_max, a_max and j_max separately, max over the
/// nine values divided by N. Never below dt_min.
double min_time_per_axis(const FlatState& x0, const FlatState& xf, const Limits& limits, int N,
                         double dt_min = 1e-3);

/// The nine per-axis times [T_v xyz, T_a xyz, T_j xyz].
std::array<double, 9> axis_times(const FlatState& x0, const FlatState& xf, const Limits& limits);

/// Smallest nonnegative real root of c3 t^3 + c2 t^2 + c1 t + c0 (c3 > 0, c0 <= 0).
double smallest_nonnegative_root(double c3, double c2, double c1, double c0);

/// Jerk QP at a fixed dt. Throws PlanningError(NoFeasibleTerminal) when the
/// box constraints cannot be met at this dt.
JerkPrimitive solve_jerk_fixed_dt(const FlatState& x0, const FlatState& xf, const Limits& limits,
                                  const JerkOptions& opts, double dt);

/// Jerk QP with the dt growth rule, starting from the per-axis lower bound.
/// Throws PlanningError(MaxIterations) if no dt within the growth cap converges.
JerkPrimitive solve_jerk(const FlatState& x0, const FlatState& xf, const Limits& limits,
                         const JerkOptions& opts = {});

/// True when the primitive meets the terminal tolerances and the KKT tolerance.
bool jerk_converged(const JerkPrimitive& prim, const FlatState& xf, const JerkOptions& opts);

VelPrimitive solve_velocity(const Vec3& p0, const Vec3& pf, double v_max,
                            const VelOptions& opts = {});

/// One velocity primitive per consecutive pair of points.
std::vector<VelPrimitive> solve_velocity_chain(const std::vector<Vec3>& points, double v_max,
                                               const VelOptions& opts = {});

/// Throws PlanningError(OutOfDomain) outside [0, duration].
FlatState sample(const JerkPrimitive& prim, double t);
FlatState sample(const VelPrimitive& prim, double t);

double cost_jerk(const JerkPrimitive& prim, double j_max);
double cost_velocity(const std::vector<VelPrimitive>& prims, double v_max);
/// Straight tail cost: |q_s - C| plus the tail polyline length, over v_max.
double cost_distance(const Vec3& c, const std::vector<Vec3>& tail, double v_max);

}  // namespace mfp::primitives
