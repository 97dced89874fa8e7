#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace agrotrack::control {

/// min 0.5 U'HU + f'U  subject to  A U <= b.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<std::string> labels;         // one per constraint row (optional)
  std::optional<Eigen::VectorXd> feasible_start;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;        // one multiplier per constraint row, >= 0
  std::vector<int> active;       // working set at exit, ascending
  int iterations = 0;
  bool optimal = false;          // false: iteration budget exhausted, x is the best feasible iterate
  double stationarity = 0.0;     // ||H x + f + A' lambda||_inf
  double complementarity = 0.0;  // max |lambda_i (a_i x - b_i)|
  double primal_violation = 0.0; // max(A x - b)_+
  double kkt_residual() const;
};

struct QpOptions {
  int max_iterations = 200;
  double feasibility_tol = 1e-10;
};

/// Primal active-set method for strictly convex QPs with deterministic
/// tie-breaking (lowest constraint index wins). Starts from feasible_start,
/// else from 0 or the unconstrained minimizer when those are feasible.
/// Throws ErrorKind::numerical when H is not positive definite and
/// ErrorKind::infeasible when no feasible start is available.
QpSolution solve_qp(const QpProblem& qp, const QpOptions& options = {});

}  // namespace agrotrack::control
