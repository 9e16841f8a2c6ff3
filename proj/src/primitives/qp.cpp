#include "mfp/primitives/qp.hpp"

#include "mfp/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace mfp::primitives {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-sided row n'x >= b (or == b for equalities).
struct Row {
  Eigen::VectorXd n;
  double b = 0.0;
  bool eq = false;
};

struct ActiveSet {
  std::vector<int> idx;
  std::vector<double> u;
};

// Step directions for adding row np: r in active-multiplier space, z in primal space.
void directions(const Eigen::MatrixXd& Hinv, const std::vector<Row>& rows, const ActiveSet& a,
                const Eigen::VectorXd& np, Eigen::VectorXd& z, Eigen::VectorXd& r) {
  const int q = static_cast<int>(a.idx.size());
  const Eigen::VectorXd hn = Hinv * np;
  if (q == 0) {
    r.resize(0);
    z = hn;
    return;
  }
  Eigen::MatrixXd M(np.size(), q);
  for (int j = 0; j < q; ++j) M.col(j) = rows[a.idx[j]].n;
  const Eigen::MatrixXd HM = Hinv * M;
  const Eigen::MatrixXd S = M.transpose() * HM;
  r = S.ldlt().solve(M.transpose() * hn);
  z = hn - HM * r;
}

void drop(ActiveSet& a, int k) {
  a.idx.erase(a.idx.begin() + k);
  a.u.erase(a.u.begin() + k);
}

}  // namespace

QpResult solve_qp(const QpProblem& p, const QpOptions& opts) {
  const int n = static_cast<int>(p.H.rows());
  QpResult res;
  Eigen::LLT<Eigen::MatrixXd> llt(p.H);
  if (llt.info() != Eigen::Success) {
    throw PlanningError(PlanningError::Code::InvalidArgument, "QP Hessian not positive definite");
  }
  const Eigen::MatrixXd Hinv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  std::vector<Row> rows;
  for (int i = 0; i < p.Aeq.rows(); ++i) rows.push_back({p.Aeq.row(i).transpose(), p.beq[i], true});
  for (int i = 0; i < p.C.rows(); ++i) {
    if (p.lower[i] > -kInf) rows.push_back({p.C.row(i).transpose(), p.lower[i], false});
    if (p.upper[i] < kInf) rows.push_back({-p.C.row(i).transpose(), -p.upper[i], false});
  }
  const int m = static_cast<int>(rows.size());
  std::vector<char> is_active(static_cast<std::size_t>(m), 0);

  Eigen::VectorXd x = -llt.solve(p.g);
  ActiveSet act;
  Eigen::VectorXd z, r;
  const auto slack = [&](int i) { return rows[i].n.dot(x) - rows[i].b; };
  const auto tol = [&](int i) { return opts.feasibility_tol * (1.0 + std::abs(rows[i].b)); };

  // Equalities: full steps, multipliers free in sign.
  for (int i = 0; i < m; ++i) {
    if (!rows[i].eq) continue;
    directions(Hinv, rows, act, rows[i].n, z, r);
    const double zn = z.dot(rows[i].n);
    const double s = slack(i);
    if (std::abs(zn) <= 1e-14 * rows[i].n.squaredNorm()) {
      if (std::abs(s) > tol(i)) {
        res.status = QpStatus::Infeasible;
        res.x = x;
        return res;
      }
      continue;  // dependent and consistent
    }
    const double t = -s / zn;
    x += t * z;
    for (std::size_t j = 0; j < act.u.size(); ++j) act.u[j] -= t * r[static_cast<int>(j)];
    act.idx.push_back(i);
    act.u.push_back(t);
    is_active[static_cast<std::size_t>(i)] = 1;
  }

  int iter = 0;
  for (;;) {
    // Most violated inactive inequality.
    int pidx = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      if (rows[i].eq || is_active[static_cast<std::size_t>(i)]) continue;
      const double s = slack(i);
      if (s < -tol(i) && s < worst) {
        worst = s;
        pidx = i;
      }
    }
    if (pidx < 0) {
      res.status = QpStatus::Optimal;
      break;
    }
    if (++iter > opts.max_iterations) {
      res.status = QpStatus::MaxIterations;
      break;
    }

    double u_p = 0.0;
    bool added = false;
    while (!added) {
      directions(Hinv, rows, act, rows[pidx].n, z, r);
      // Partial step: largest t keeping active inequality multipliers >= 0.
      double t1 = kInf;
      int k = -1;
      for (std::size_t j = 0; j < act.idx.size(); ++j) {
        if (rows[act.idx[j]].eq) continue;
        const double rj = r[static_cast<int>(j)];
        if (rj > 0.0) {
          const double tj = act.u[j] / rj;
          if (tj < t1) {
            t1 = tj;
            k = static_cast<int>(j);
          }
        }
      }
      const double zn = z.dot(rows[pidx].n);
      const bool z_zero = zn <= 1e-14 * rows[pidx].n.squaredNorm();
      const double t2 = z_zero ? kInf : -slack(pidx) / zn;

      if (z_zero && t1 == kInf) {
        res.status = QpStatus::Infeasible;
        res.x = x;
        res.iterations = iter;
        return res;
      }
      const double t = std::min(t1, t2);
      if (!z_zero) x += t * z;
      for (std::size_t j = 0; j < act.u.size(); ++j) act.u[j] -= t * r[static_cast<int>(j)];
      u_p += t;
      if (t2 <= t1) {
        act.idx.push_back(pidx);
        act.u.push_back(u_p);
        is_active[static_cast<std::size_t>(pidx)] = 1;
        added = true;
      } else {
        is_active[static_cast<std::size_t>(act.idx[static_cast<std::size_t>(k)])] = 0;
        drop(act, k);
      }
    }
  }

  res.x = x;
  res.iterations = iter;
  res.active_count = static_cast<int>(act.idx.size());
  res.objective = 0.5 * x.dot(p.H * x) + p.g.dot(x);

  Eigen::VectorXd stat = p.H * x + p.g;
  double dual = 0.0;
  double comp = 0.0;
  for (std::size_t j = 0; j < act.idx.size(); ++j) {
    const Row& row = rows[act.idx[j]];
    stat -= act.u[j] * row.n;
    if (!row.eq) {
      dual = std::max(dual, -act.u[j]);
      comp = std::max(comp, std::abs(act.u[j] * slack(act.idx[j])));
    }
  }
  double primal = 0.0;
  for (int i = 0; i < m; ++i) {
    const double s = slack(i);
    primal = std::max(primal, rows[i].eq ? std::abs(s) : -s);
  }
  const double scale = 1.0 + p.g.cwiseAbs().maxCoeff();
  res.kkt_residual = std::max({stat.cwiseAbs().maxCoeff() / scale, primal, dual, comp / scale});
  return res;
}

}  // namespace mfp::primitives
