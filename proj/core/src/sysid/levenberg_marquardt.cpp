#include "agrotrack/sysid/levenberg_marquardt.hpp"

#include <cmath>

namespace agrotrack::sysid {

LmResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd x0,
                             const LmOptions& opt) {
  LmResult res;
  res.x = std::move(x0);
  Eigen::VectorXd r = residual(res.x);
  res.cost = r.squaredNorm();
  res.cost_history.push_back(res.cost);
  if (!std::isfinite(res.cost)) {
    res.jacobian = jacobian(res.x);
    return res;
  }

  double lambda = opt.lambda0;
  Eigen::MatrixXd J = jacobian(res.x);
  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-300 || res.cost == 0.0) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd diag = JtJ.diagonal().cwiseMax(1e-300);

    bool accepted = false;
    bool tiny_step = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd M = JtJ;
      M.diagonal() += lambda * diag;
      const Eigen::VectorXd step = M.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      tiny_step = step.norm() <= opt.step_tol * (res.x.norm() + opt.step_tol);
      const Eigen::VectorXd x_new = res.x + step;
      const Eigen::VectorXd r_new = residual(x_new);
      const double cost_new = r_new.squaredNorm();
      if (std::isfinite(cost_new) && cost_new < res.cost) {
        const double decrease = (res.cost - cost_new) / res.cost;
        res.x = x_new;
        r = r_new;
        res.cost = cost_new;
        res.cost_history.push_back(cost_new);
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (tiny_step || decrease <= opt.cost_tol) res.converged = true;
        break;
      }
      if (tiny_step) break;
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at machine precision: a stationary point.
      res.converged = tiny_step || lambda >= 1e16;
      break;
    }
    J = jacobian(res.x);
    if (res.converged) break;
  }
  res.jacobian = J;
  return res;
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd r0 = residual(x);
  Eigen::MatrixXd J(r0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * (1.0 + std::abs(x(i)));
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    J.col(i) = (residual(xp) - residual(xm)) / (2.0 * step);
  }
  return J;
}

}  // namespace agrotrack::sysid
