#include "agrotrack/control/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "agrotrack/control/discretize.hpp"
#include "agrotrack/errors.hpp"
#include "agrotrack/polynomial.hpp"

namespace agrotrack::control {

void MpcConfig::validate() const {
  if (nc < 1 || np < nc) fail(ErrorKind::config, "mpc: require 1 <= nc <= np");
  if (!(u_min < u_max)) fail(ErrorKind::config, "mpc: require u_min < u_max");
  if (!(du_min < du_max)) fail(ErrorKind::config, "mpc: require du_min < du_max");
  if (q < 0.0 || !(r > 0.0)) fail(ErrorKind::config, "mpc: require q >= 0 and r > 0");
  if (!(Ts > 0.0)) fail(ErrorKind::config, "mpc: sample time must be positive");
  if (!model.is_discrete()) fail(ErrorKind::config, "mpc: prediction model must be discrete");
  if (model.inputs() != 1 || model.outputs() != 1) fail(ErrorKind::config, "mpc: prediction model must be SISO");
  if (std::abs(*model.dt - Ts) > 1e-12) fail(ErrorKind::config, "mpc: model sample time differs from Ts");
}

Prediction condense(const MpcConfig& cfg) {
  const auto& A = cfg.model.A;
  const auto& B = cfg.model.B;
  const auto& C = cfg.model.C;
  const Eigen::Index n = A.rows();
  Prediction p{Eigen::MatrixXd::Zero(cfg.np, n), Eigen::MatrixXd::Zero(cfg.np, cfg.nc)};

  // markov(i) = C A^i B; step response of the held tail accumulates markov terms.
  std::vector<double> markov(static_cast<std::size_t>(cfg.np));
  Eigen::MatrixXd Ai = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < cfg.np; ++i) {
    markov[static_cast<std::size_t>(i)] = (C * Ai * B)(0, 0);
    Ai = A * Ai;
    p.Phi.row(i) = C * Ai;
  }
  for (int i = 0; i < cfg.np; ++i) {      // output y_{k+i+1}
    for (int j = 0; j <= i; ++j) {        // input u_{k+j}
      const int col = std::min(j, cfg.nc - 1);
      p.Gamma(i, col) += markov[static_cast<std::size_t>(i - j)];
    }
  }
  return p;
}

MpcQp build_qp(const MpcConfig& cfg, const Eigen::VectorXd& x_now, const std::vector<double>& gamma_ref,
               double u_prev) {
  cfg.validate();
  if (x_now.size() != cfg.model.states()) fail(ErrorKind::dimension, "build_qp: state size mismatch");
  if (static_cast<int>(gamma_ref.size()) < cfg.np) fail(ErrorKind::dimension, "build_qp: reference shorter than np");

  const int nc = cfg.nc;
  const double step_lo = cfg.du_min * cfg.Ts;
  const double step_hi = cfg.du_max * cfg.Ts;

  Eigen::VectorXd start(nc);
  double prev = u_prev;
  for (int j = 0; j < nc; ++j) {
    const double lo = std::max(cfg.u_min, prev + step_lo);
    const double hi = std::min(cfg.u_max, prev + step_hi);
    if (lo > hi) {
      const char* binding = (prev + step_hi < cfg.u_min) ? "u >= u_min" : "u <= u_max";
      fail(ErrorKind::infeasible, "build_qp: constraint '" + std::string(binding) + "' unreachable from u_prev within the rate limit at u[" +
                                      std::to_string(j) + "]");
    }
    start(j) = std::clamp(prev, lo, hi);
    prev = start(j);
  }

  MpcQp out;
  out.prediction = condense(cfg);
  out.free_response = out.prediction.Phi * x_now;
  const auto& G = out.prediction.Gamma;

  Eigen::VectorXd ref(cfg.np);
  for (int i = 0; i < cfg.np; ++i) ref(i) = gamma_ref[static_cast<std::size_t>(i)];

  Eigen::VectorXd u_target = Eigen::VectorXd::Zero(nc);
  if (cfg.penalty == InputPenalty::steady_state_deviation) {
    const double gain = discrete_dc_gain(cfg.model);
    if (std::abs(gain) < 1e-12) fail(ErrorKind::numerical, "build_qp: prediction model has zero DC gain");
    for (int j = 0; j < nc; ++j) u_target(j) = ref(std::min(j, cfg.np - 1)) / gain;
  }

  auto& qp = out.qp;
  qp.H = 2.0 * (cfg.q * G.transpose() * G + cfg.r * Eigen::MatrixXd::Identity(nc, nc));
  qp.f = 2.0 * (cfg.q * G.transpose() * (out.free_response - ref) - cfg.r * u_target);

  qp.A = Eigen::MatrixXd::Zero(4 * nc, nc);
  qp.b = Eigen::VectorXd::Zero(4 * nc);
  qp.labels.reserve(static_cast<std::size_t>(4 * nc));
  for (int j = 0; j < nc; ++j) {
    const std::string idx = "[" + std::to_string(j) + "]";
    qp.A(4 * j, j) = 1.0;
    qp.b(4 * j) = cfg.u_max;
    qp.labels.push_back("u" + idx + " <= u_max");
    qp.A(4 * j + 1, j) = -1.0;
    qp.b(4 * j + 1) = -cfg.u_min;
    qp.labels.push_back("u" + idx + " >= u_min");
    qp.A(4 * j + 2, j) = 1.0;
    qp.A(4 * j + 3, j) = -1.0;
    if (j == 0) {
      qp.b(2) = u_prev + step_hi;
      qp.b(3) = -(u_prev + step_lo);
    } else {
      qp.A(4 * j + 2, j - 1) = -1.0;
      qp.A(4 * j + 3, j - 1) = 1.0;
      qp.b(4 * j + 2) = step_hi;
      qp.b(4 * j + 3) = -step_lo;
    }
    qp.labels.push_back("du" + idx + " <= du_max");
    qp.labels.push_back("du" + idx + " >= du_min");
  }
  qp.feasible_start = start;
  return out;
}

MpcStep mpc_step(const MpcConfig& cfg, const Eigen::VectorXd& x_now, const std::vector<double>& gamma_ref,
                 double u_prev) {
  const MpcQp problem = build_qp(cfg, x_now, gamma_ref, u_prev);
  const QpSolution sol = solve_qp(problem.qp);

  MpcStep out;
  out.U = sol.x;
  out.delta_desired = sol.x(0);
  out.predicted_output = problem.free_response + problem.prediction.Gamma * sol.x;
  for (int idx : sol.active) out.active_constraints.push_back(problem.qp.labels[static_cast<std::size_t>(idx)]);
  out.qp_iterations = sol.iterations;
  out.optimal = sol.optimal;
  out.kkt_residual = sol.kkt_residual();
  return out;
}

Eigen::VectorXd observer_gain(const dynamics::StateSpace& model) {
  const auto& A = model.A;
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd CA = model.C * A;

  Eigen::MatrixXd O(n, n);
  Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    O.row(i) = CA * Ak;
    Ak = A * Ak;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(O);
  if (!lu.isInvertible()) fail(ErrorKind::numerical, "observer_gain: model is not observable from the output");

  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  std::vector<std::complex<double>> targets;
  for (Eigen::Index i = 0; i < n; ++i) targets.push_back(std::pow(es.eigenvalues()(i), 3));
  const std::vector<double> phi = poly_from_roots(targets);

  // Ackermann: L = phi(A) O^-1 e_n for the pair (A, C A).
  Eigen::MatrixXd phiA = Eigen::MatrixXd::Zero(n, n);
  for (double c : phi) phiA = phiA * A + c * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd en = Eigen::VectorXd::Zero(n);
  en(n - 1) = 1.0;
  return phiA * lu.solve(en);
}

YawRateMpc::YawRateMpc(MpcConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  L_ = observer_gain(cfg_.model);
  x_hat_ = Eigen::VectorXd::Zero(cfg_.model.states());
}

void YawRateMpc::reset() {
  x_hat_.setZero();
  u_prev_ = 0.0;
}

MpcStep YawRateMpc::step(double gamma_measured, double gamma_ref) {
  const auto& m = cfg_.model;
  x_hat_ += L_ * (gamma_measured - (m.C * x_hat_)(0, 0));
  const std::vector<double> ref(static_cast<std::size_t>(cfg_.np), gamma_ref);
  MpcStep out = mpc_step(cfg_, x_hat_, ref, u_prev_);
  u_prev_ = out.delta_desired;
  x_hat_ = m.A * x_hat_ + m.B.col(0) * u_prev_;
  return out;
}

}  // namespace agrotrack::control
