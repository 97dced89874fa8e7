#include "agrotrack/estimation/kalman.hpp"

#include "agrotrack/errors.hpp"

namespace agrotrack::estimation {

Eigen::Matrix4d kf_transition(double Ts) {
  Eigen::Matrix4d Phi = Eigen::Matrix4d::Identity();
  Phi(0, 1) = Ts;
  Phi(2, 3) = Ts;
  return Phi;
}

KfState kf_predict(const KfState& state, double Ts, const Eigen::Matrix4d& Q) {
  if (!(Ts > 0.0)) fail(ErrorKind::domain, "kf_predict: Ts must be positive");
  const Eigen::Matrix4d Phi = kf_transition(Ts);
  KfState out;
  out.x_hat = Phi * state.x_hat;
  out.P = Phi * state.P * Phi.transpose() + Q;
  out.P = 0.5 * (out.P + out.P.transpose().eval());
  return out;
}

KfState kf_update(const KfState& state, const GpsFix& z, const Eigen::Matrix4d& R) {
  const Eigen::Vector4d meas(z.x, z.v_x, z.y, z.v_y);
  const Eigen::Matrix4d S = state.P + R;
  Eigen::FullPivLU<Eigen::Matrix4d> lu(S);
  if (!lu.isInvertible()) fail(ErrorKind::numerical, "kf_update: innovation covariance is singular");
  const Eigen::Matrix4d K = state.P * lu.inverse();
  const Eigen::Matrix4d IK = Eigen::Matrix4d::Identity() - K;
  KfState out;
  out.x_hat = state.x_hat + K * (meas - state.x_hat);
  out.P = IK * state.P * IK.transpose() + K * R * K.transpose();
  out.P = 0.5 * (out.P + out.P.transpose().eval());
  return out;
}

KfState kf_step(const KfState& state, const GpsFix& z, double Ts, const KfNoise& noise) {
  return kf_update(kf_predict(state, Ts, noise.Q), z, noise.R);
}

}  // namespace agrotrack::estimation
