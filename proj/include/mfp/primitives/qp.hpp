#pragma once

#include <Eigen/Core>

#include <vector>

namespace mfp::primitives {

/**
 * @brief Dense strictly convex QP.
 *
 *   min 0.5 x'Hx + g'x   s.t.  Aeq x = beq,  lower <= C x <= upper
 *
 * Infinite entries of lower/upper disable that side of the row.
 */
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd C;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct QpOptions {
  int max_iterations = 500;
  double feasibility_tol = 1e-9;
};

enum class QpStatus { Optimal, Infeasible, MaxIterations };

struct QpResult {
  QpStatus status = QpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// max(stationarity / (1 + |g|inf), primal violation, dual sign violation, complementarity)
  double kkt_residual = 0.0;
  int iterations = 0;
  int active_count = 0;
};

/// Dual active-set method (Goldfarb-Idnani). H must be positive definite.
QpResult solve_qp(const QpProblem& p, const QpOptions& opts = {});

}  // namespace mfp::primitives
