#include "agrotrack/control/discretize.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "agrotrack/errors.hpp"

namespace agrotrack::control {

dynamics::StateSpace discretize(const dynamics::StateSpace& ss, double Ts) {
  if (!(Ts > 0.0)) fail(ErrorKind::domain, "discretize: Ts must be positive");
  if (ss.is_discrete()) fail(ErrorKind::domain, "discretize: model is already discrete");
  const Eigen::Index n = ss.states(), m = ss.inputs();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = ss.A * Ts;
  aug.topRightCorner(n, m) = ss.B * Ts;
  const Eigen::MatrixXd e = aug.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m), ss.C, ss.D, Ts};
}

double discrete_dc_gain(const dynamics::StateSpace& ss) {
  if (ss.inputs() != 1 || ss.outputs() != 1) fail(ErrorKind::dimension, "discrete_dc_gain: model must be SISO");
  const Eigen::Index n = ss.states();
  const Eigen::MatrixXd I_minus_A = Eigen::MatrixXd::Identity(n, n) - ss.A;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(I_minus_A);
  if (!lu.isInvertible()) fail(ErrorKind::numerical, "discrete_dc_gain: model has a pole at z = 1");
  return (ss.C * lu.solve(ss.B) + ss.D)(0, 0);
}

}  // namespace agrotrack::control
