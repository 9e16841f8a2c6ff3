#include "mfp/primitives/primitives.hpp"

#include "mfp/primitives/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace mfp::primitives {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Mat3 = Eigen::Matrix3d;
using Row3 = Eigen::RowVector3d;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct AxisSolution {
  Eigen::VectorXd u;
  double objective = 0.0;
  double kkt = 0.0;
  int iterations = 0;
};

// Condensed single-axis jerk QP: states x_k = Phi_k x0 + Gam_k u.
std::optional<AxisSolution> solve_axis_jerk(const Eigen::Vector3d& x0, const Eigen::Vector3d& xf,
                                            const Eigen::Vector3d& q, const Limits& lim, int N,
                                            double dt) {
  Mat3 M1;
  M1 << 1, dt, 0.5 * dt * dt, 0, 1, dt, 0, 0, 1;
  const Eigen::Vector3d M2(dt * dt * dt / 6.0, 0.5 * dt * dt, dt);

  QpProblem p;
  p.C.resize(3 * N, N);
  p.lower.resize(3 * N);
  p.upper.resize(3 * N);
  p.C.setZero();

  Mat3 Phi = Mat3::Identity();
  Eigen::MatrixXd Gam = Eigen::MatrixXd::Zero(3, N);
  for (int k = 0; k < N; ++k) {
    Phi = M1 * Phi;
    Gam = M1 * Gam;
    Gam.col(k) += M2;
    const Eigen::Vector3d free_resp = Phi * x0;
    // velocity and acceleration rows for state k+1
    p.C.row(2 * k) = Gam.row(1);
    p.lower[2 * k] = -lim.v_max - free_resp[1];
    p.upper[2 * k] = lim.v_max - free_resp[1];
    p.C.row(2 * k + 1) = Gam.row(2);
    p.lower[2 * k + 1] = -lim.a_max - free_resp[2];
    p.upper[2 * k + 1] = lim.a_max - free_resp[2];
  }
  for (int k = 0; k < N; ++k) {
    p.C(2 * N + k, k) = 1.0;
    p.lower[2 * N + k] = -lim.j_max;
    p.upper[2 * N + k] = lim.j_max;
  }
  const Eigen::Vector3d e0 = Phi * x0 - xf;
  const Eigen::MatrixXd QG = q.asDiagonal() * Gam;
  p.H = 2.0 * (Eigen::MatrixXd::Identity(N, N) + Gam.transpose() * QG);
  p.g = 2.0 * QG.transpose() * e0;

  const QpResult r = solve_qp(p);
  if (r.status != QpStatus::Optimal) return std::nullopt;
  AxisSolution s;
  s.u = r.x;
  s.objective = r.objective + e0.dot(q.cwiseProduct(e0));
  s.kkt = r.kkt_residual;
  s.iterations = r.iterations;
  return s;
}

std::optional<JerkPrimitive> try_jerk(const FlatState& x0, const FlatState& xf,
                                      const Limits& lim, const JerkOptions& opts, double dt) {
  JerkPrimitive prim;
  prim.x0 = x0;
  prim.dt = dt;
  prim.N = opts.N;
  prim.inputs.assign(static_cast<std::size_t>(opts.N), Vec3::Zero());
  for (int ax = 0; ax < 3; ++ax) {
    const Eigen::Vector3d a0(x0.pos[ax], x0.vel[ax], x0.acc[ax]);
    const Eigen::Vector3d af(xf.pos[ax], xf.vel[ax], xf.acc[ax]);
    const Eigen::Vector3d q(opts.Q.diag[ax], opts.Q.diag[3 + ax], opts.Q.diag[6 + ax]);
    auto s = solve_axis_jerk(a0, af, q, lim, opts.N, dt);
    if (!s) return std::nullopt;
    for (int k = 0; k < opts.N; ++k) prim.inputs[static_cast<std::size_t>(k)][ax] = s->u[k];
    prim.objective += s->objective;
    prim.kkt_residual = std::max(prim.kkt_residual, s->kkt);
    prim.qp_iterations += s->iterations;
  }
  prim.knots.reserve(static_cast<std::size_t>(opts.N) + 1);
  prim.knots.push_back(x0);
  for (const Vec3& u : prim.inputs) prim.knots.push_back(propagate(prim.knots.back(), u, dt));
  prim.terminal = prim.knots.back();
  return prim;
}

void check_time(double t, double duration) {
  if (!(t >= -1e-12 && t <= duration + 1e-12)) {
    std::ostringstream os;
    os << "sample time " << t << " outside [0, " << duration << "]";
    throw PlanningError(PlanningError::Code::OutOfDomain, os.str());
  }
}

}  // namespace

TerminalWeight TerminalWeight::uniform(double q_pos, double q_vel, double q_acc) {
  TerminalWeight w;
  w.diag << q_pos, q_pos, q_pos, q_vel, q_vel, q_vel, q_acc, q_acc, q_acc;
  return w;
}

FlatState propagate(const FlatState& x, const Vec3& u, double tau) {
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  return {x.pos + x.vel * tau + x.acc * (0.5 * t2) + u * (t3 / 6.0),
          x.vel + x.acc * tau + u * (0.5 * t2), x.acc + u * tau};
}

double smallest_nonnegative_root(double c3, double c2, double c1, double c0) {
  if (c0 >= 0.0) return 0.0;
  auto f = [&](double t) { return ((c3 * t + c2) * t + c1) * t + c0; };
  // Monotone pieces split at the positive critical points.
  std::vector<double> cuts{0.0};
  const double a = 3.0 * c3, b = 2.0 * c2, c = c1;
  const double disc = b * b - 4.0 * a * c;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    for (double r : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
      if (r > 0.0) cuts.push_back(r);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double hi = std::max(1.0, cuts.back());
  while (f(hi) < 0.0) hi *= 2.0;
  cuts.push_back(hi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], up = cuts[i + 1];
    if (f(up) < 0.0) continue;
    for (int it = 0; it < 200 && up - lo > 1e-15 * std::max(1.0, up); ++it) {
      const double mid = 0.5 * (lo + up);
      (f(mid) < 0.0 ? lo : up) = mid;
    }
    return up;
  }
  return hi;
}

std::array<double, 9> axis_times(const FlatState& x0, const FlatState& xf, const Limits& lim) {
  std::array<double, 9> t{};
  for (int ax = 0; ax < 3; ++ax) {
    const double dp = xf.pos[ax] - x0.pos[ax];
    const double s = sgn(dp);
    const double d = std::abs(dp);
    const double v0 = x0.vel[ax];
    const double a0 = x0.acc[ax];
    t[ax] = d / lim.v_max;
    t[3 + ax] = d > 0.0 ? (-s * v0 + std::sqrt(v0 * v0 + 2.0 * lim.a_max * d)) / lim.a_max : 0.0;
    t[6 + ax] = smallest_nonnegative_root(lim.j_max / 6.0, 0.5 * s * a0, s * v0, -d);
  }
  return t;
}

double min_time_per_axis(const FlatState& x0, const FlatState& xf, const Limits& limits, int N,
                         double dt_min) {
  if (N < 1) throw PlanningError(PlanningError::Code::InvalidArgument, "N must be >= 1");
  const auto t = axis_times(x0, xf, limits);
  const double tmax = *std::max_element(t.begin(), t.end());
  return std::max(tmax / N, dt_min);
}

JerkPrimitive solve_jerk_fixed_dt(const FlatState& x0, const FlatState& xf, const Limits& limits,
                                  const JerkOptions& opts, double dt) {
  auto p = try_jerk(x0, xf, limits, opts, dt);
  if (!p) {
    throw PlanningError(PlanningError::Code::NoFeasibleTerminal,
                        "jerk QP infeasible at the given dt");
  }
  p->dt0 = dt;
  return *p;
}

bool jerk_converged(const JerkPrimitive& prim, const FlatState& xf, const JerkOptions& opts) {
  return prim.kkt_residual <= opts.kkt_tol &&
         (prim.terminal.pos - xf.pos).norm() <= opts.pos_tol &&
         (prim.terminal.vel - xf.vel).norm() <= opts.vel_tol &&
         (prim.terminal.acc - xf.acc).norm() <= opts.acc_tol;
}

JerkPrimitive solve_jerk(const FlatState& x0, const FlatState& xf, const Limits& limits,
                         const JerkOptions& opts) {
  if (!x0.finite() || !xf.finite()) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "non-finite primitive boundary");
  }
  const double dt0 = min_time_per_axis(x0, xf, limits, opts.N, opts.dt_min);
  double dt = dt0;
  for (int it = 0; it <= opts.max_growth; ++it, dt *= opts.gamma) {
    auto p = try_jerk(x0, xf, limits, opts, dt);
    if (p && jerk_converged(*p, xf, opts)) {
      p->dt0 = dt0;
      p->dt_iterations = it + 1;
      return *p;
    }
  }
  throw PlanningError(PlanningError::Code::MaxIterations,
                      "jerk primitive did not converge within the dt growth cap");
}

VelPrimitive solve_velocity(const Vec3& p0, const Vec3& pf, double v_max, const VelOptions& opts) {
  const int N = opts.N;
  const double tv = (pf - p0).cwiseAbs().maxCoeff() / v_max;
  double dt = std::max(tv / N, opts.dt_min);

  QpProblem qp;
  qp.H = 2.0 * Eigen::MatrixXd::Identity(N, N);
  qp.g = Eigen::VectorXd::Zero(N);
  qp.C = Eigen::MatrixXd::Identity(N, N);
  qp.lower = Eigen::VectorXd::Constant(N, -v_max);
  qp.upper = Eigen::VectorXd::Constant(N, v_max);
  for (int it = 0; it <= opts.max_growth; ++it, dt *= opts.gamma) {
    VelPrimitive prim;
    prim.p0 = p0;
    prim.pf = pf;
    prim.dt = dt;
    prim.N = N;
    prim.inputs.assign(static_cast<std::size_t>(N), Vec3::Zero());
    bool ok = true;
    for (int ax = 0; ax < 3 && ok; ++ax) {
      qp.Aeq = Eigen::MatrixXd::Constant(1, N, dt);
      qp.beq = Eigen::VectorXd::Constant(1, pf[ax] - p0[ax]);
      const QpResult r = solve_qp(qp);
      ok = r.status == QpStatus::Optimal && r.kkt_residual <= opts.kkt_tol;
      if (!ok) break;
      for (int k = 0; k < N; ++k) prim.inputs[static_cast<std::size_t>(k)][ax] = r.x[k];
      prim.objective += r.objective;
      prim.kkt_residual = std::max(prim.kkt_residual, r.kkt_residual);
    }
    if (ok) return prim;
  }
  throw PlanningError(PlanningError::Code::MaxIterations,
                      "velocity primitive did not converge within the dt growth cap");
}

std::vector<VelPrimitive> solve_velocity_chain(const std::vector<Vec3>& points, double v_max,
                                               const VelOptions& opts) {
  if (points.size() < 2) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "velocity chain needs >= 2 points");
  }
  std::vector<VelPrimitive> out;
  out.reserve(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    out.push_back(solve_velocity(points[i], points[i + 1], v_max, opts));
  }
  return out;
}

FlatState sample(const JerkPrimitive& prim, double t) {
  check_time(t, prim.duration());
  if (t <= 0.0) return prim.x0;
  if (t >= prim.duration()) return prim.terminal;
  const int k = std::min(static_cast<int>(t / prim.dt), prim.N - 1);
  return propagate(prim.knots[static_cast<std::size_t>(k)], prim.inputs[static_cast<std::size_t>(k)],
                   t - k * prim.dt);
}

FlatState sample(const VelPrimitive& prim, double t) {
  check_time(t, prim.duration());
  FlatState s;
  s.pos = prim.p0;
  if (t <= 0.0) {
    s.vel = prim.inputs.empty() ? Vec3::Zero() : prim.inputs.front();
    return s;
  }
  const int k = std::min(static_cast<int>(t / prim.dt), prim.N - 1);
  for (int i = 0; i < k; ++i) s.pos += prim.inputs[static_cast<std::size_t>(i)] * prim.dt;
  s.pos += prim.inputs[static_cast<std::size_t>(k)] * std::min(t - k * prim.dt, prim.dt);
  s.vel = prim.inputs[static_cast<std::size_t>(k)];
  return s;
}

double cost_jerk(const JerkPrimitive& prim, double j_max) {
  double sum = 0.0;
  for (const Vec3& u : prim.inputs) sum += u.squaredNorm();
  return prim.N * prim.dt / (j_max * j_max) * sum;
}

double cost_velocity(const std::vector<VelPrimitive>& prims, double v_max) {
  double total = 0.0;
  for (const VelPrimitive& p : prims) {
    double sum = 0.0;
    for (const Vec3& v : p.inputs) sum += v.squaredNorm();
    total += p.N * p.dt / (v_max * v_max) * sum;
  }
  return total;
}

double cost_distance(const Vec3& c, const std::vector<Vec3>& tail, double v_max) {
  if (tail.empty()) return 0.0;
  double len = (tail.front() - c).norm();
  for (std::size_t i = 1; i < tail.size(); ++i) len += (tail[i] - tail[i - 1]).norm();
  return len / v_max;
}

}  // namespace mfp::primitives
