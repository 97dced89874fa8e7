#include "agrotrack/estimation/ekf.hpp"

#include <cmath>
#include <numbers>

#include "agrotrack/errors.hpp"
#include "agrotrack/units.hpp"

namespace agrotrack::estimation {
namespace {

void require_finite(const Eigen::Vector3d& v, const char* where) {
  if (!v.allFinite()) fail(ErrorKind::numerical, std::string(where) + ": non-finite estimate");
}

}  // namespace

Eigen::Vector3d ekf_motion(const Eigen::Vector3d& pose, double v_x, double delta, double wheelbase, double Ts) {
  const double psi = pose(2);
  return {pose(0) + Ts * v_x * std::cos(psi), pose(1) + Ts * v_x * std::sin(psi),
          wrap_angle(psi + Ts * v_x * std::tan(delta) / wheelbase)};
}

Eigen::Matrix3d ekf_motion_jacobian(const Eigen::Vector3d& pose, double v_x, double Ts) {
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
  F(0, 2) = -Ts * v_x * std::sin(pose(2));
  F(1, 2) = Ts * v_x * std::cos(pose(2));
  return F;
}

EkfState ekf_predict(const EkfState& state, double v_x, double delta, const dynamics::VehicleParams& params, double Ts) {
  if (!(Ts > 0.0)) fail(ErrorKind::domain, "ekf_predict: Ts must be positive");
  if (!(std::abs(delta) < std::numbers::pi / 2)) fail(ErrorKind::domain, "ekf_predict: |delta| must be below 90 deg");
  EkfState out = state;
  const Eigen::Matrix3d F = ekf_motion_jacobian(state.x_hat, v_x, Ts);
  out.x_hat = ekf_motion(state.x_hat, v_x, delta, params.wheelbase(), Ts);
  out.P = F * state.P * F.transpose() + state.Q;
  out.P = 0.5 * (out.P + out.P.transpose().eval());
  require_finite(out.x_hat, "ekf_predict");
  return out;
}

EkfState ekf_update(const EkfState& state, const GpsFix& z, double speed_gate) {
  const bool use_heading = std::hypot(z.v_x, z.v_y) >= speed_gate;
  const int m = use_heading ? 3 : 2;

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(m, 3);
  Eigen::VectorXd innov(m);
  innov(0) = z.x - state.x_hat(0);
  innov(1) = z.y - state.x_hat(1);
  if (use_heading) innov(2) = wrap_angle(std::atan2(z.v_y, z.v_x) - state.x_hat(2));
  const Eigen::MatrixXd R = state.R.topLeftCorner(m, m);

  const Eigen::MatrixXd S = H * state.P * H.transpose() + R;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
  if (!lu.isInvertible()) fail(ErrorKind::numerical, "ekf_update: innovation covariance is singular");
  const Eigen::MatrixXd K = state.P * H.transpose() * lu.inverse();
  const Eigen::Matrix3d IKH = Eigen::Matrix3d::Identity() - K * H;

  EkfState out = state;
  out.x_hat = state.x_hat + K * innov;
  out.x_hat(2) = wrap_angle(out.x_hat(2));
  out.P = IKH * state.P * IKH.transpose() + K * R * K.transpose();
  out.P = 0.5 * (out.P + out.P.transpose().eval());
  out.heading_gated = !use_heading;
  require_finite(out.x_hat, "ekf_update");
  return out;
}

}  // namespace agrotrack::estimation
