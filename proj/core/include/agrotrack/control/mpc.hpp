#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "agrotrack/control/qp.hpp"
#include "agrotrack/dynamics/linear_models.hpp"
#include "agrotrack/units.hpp"

namespace agrotrack::control {

/// What the input weight R penalizes.
enum class InputPenalty {
  steady_state_deviation,  // (u - u_ss)^2 with u_ss = gamma_ref / DC gain; no offset on the model
  absolute,                // u^2 as written in the cost; leaves a reference-dependent offset
};

struct MpcConfig {
  dynamics::StateSpace model;  // discrete SISO prediction model (input delta, output gamma)
  int np = 8;
  int nc = 3;
  double q = 0.5;
  double r = 1.0;
  double u_min = deg2rad(-45.0);
  double u_max = deg2rad(45.0);
  double du_min = deg2rad(-55.0);  // [rad/s]
  double du_max = deg2rad(55.0);   // [rad/s]
  double Ts = 0.05;
  InputPenalty penalty = InputPenalty::steady_state_deviation;

  /// Throws ErrorKind::config when horizons, weights, bounds or the model are invalid.
  void validate() const;
};

/// Condensed prediction Y = Phi x + Gamma U with the input held at U[nc-1] beyond nc.
struct Prediction {
  Eigen::MatrixXd Phi;    // np x n
  Eigen::MatrixXd Gamma;  // np x nc
};

Prediction condense(const MpcConfig& cfg);

struct MpcQp {
  QpProblem qp;
  Prediction prediction;
  Eigen::VectorXd free_response;  // Phi x_now
};

/// Builds the QP over U = [u_k ... u_{k+nc-1}]. gamma_ref must hold at least np
/// values. Throws ErrorKind::infeasible naming the binding constraint when the
/// rate limits cannot reach the admissible steering range from u_prev.
MpcQp build_qp(const MpcConfig& cfg, const Eigen::VectorXd& x_now, const std::vector<double>& gamma_ref,
               double u_prev);

struct MpcStep {
  double delta_desired = 0.0;
  Eigen::VectorXd U;
  Eigen::VectorXd predicted_output;  // np predicted yaw rates
  std::vector<std::string> active_constraints;
  int qp_iterations = 0;
  bool optimal = false;
  double kkt_residual = 0.0;
};

MpcStep mpc_step(const MpcConfig& cfg, const Eigen::VectorXd& x_now, const std::vector<double>& gamma_ref,
                 double u_prev);

/// Gain L for the current-state observer x = x_pred + L (y - C x_pred), with the
/// error dynamics (I - L C) A placed at the cube of the model poles, i.e. three
/// times the plant pole speed.
Eigen::VectorXd observer_gain(const dynamics::StateSpace& discrete_model);

/// Yaw-rate MPC with its state observer. The reference is held over the horizon.
class YawRateMpc {
 public:
  explicit YawRateMpc(MpcConfig cfg);

  /// Corrects the state estimate with the measured yaw rate, solves the QP and
  /// propagates the estimate with the emitted input.
  MpcStep step(double gamma_measured, double gamma_ref);
  void reset();

  const MpcConfig& config() const { return cfg_; }
  const Eigen::VectorXd& state_estimate() const { return x_hat_; }
  double last_input() const { return u_prev_; }

 private:
  MpcConfig cfg_;
  Eigen::VectorXd L_;
  Eigen::VectorXd x_hat_;
  double u_prev_ = 0.0;
};

}  // namespace agrotrack::control
