#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace agrotrack::sysid {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct LmOptions {
  int max_iter = 200;
  double step_tol = 1e-12;  // relative step size
  double cost_tol = 1e-15;  // relative cost decrease
  double lambda0 = 1e-3;
};

struct LmResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // sum of squared residuals
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;  // accepted iterates, starting with the initial cost
  Eigen::MatrixXd jacobian;          // at x
};

/// Damped Gauss-Newton with Marquardt diagonal scaling. Only cost-decreasing
/// steps are accepted.
LmResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd x0,
                             const LmOptions& options = {});

/// Central-difference Jacobian with relative step h (1 + |x_i|).
Eigen::MatrixXd numeric_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x, double h = 1e-6);

}  // namespace agrotrack::sysid
