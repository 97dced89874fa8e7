#pragma once

#include <Eigen/Dense>

namespace agrotrack::estimation {

/// Constant-velocity filter state ordered (x, v_x, y, v_y).
struct KfState {
  Eigen::Vector4d x_hat = Eigen::Vector4d::Zero();
  Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
};

struct KfNoise {
  Eigen::Matrix4d Q = 1e-4 * Eigen::Matrix4d::Identity();
  Eigen::Matrix4d R = Eigen::Vector4d(0.02 * 0.02, 0.02 * 0.02, 0.02 * 0.02, 0.02 * 0.02).asDiagonal();
};

/// GPS fix: position and velocity in the world frame.
struct GpsFix {
  double x = 0.0;
  double y = 0.0;
  double v_x = 0.0;
  double v_y = 0.0;
};

/// Transition matrix of the random-walk velocity model over Ts.
Eigen::Matrix4d kf_transition(double Ts);

KfState kf_predict(const KfState& state, double Ts, const Eigen::Matrix4d& Q);

/// Measurement update with H = I (every state measured), Joseph form.
/// Throws ErrorKind::numerical when the innovation covariance is singular.
KfState kf_update(const KfState& state, const GpsFix& z, const Eigen::Matrix4d& R);

/// Predict then update. Throws ErrorKind::domain when Ts <= 0.
KfState kf_step(const KfState& state, const GpsFix& z, double Ts, const KfNoise& noise);

}  // namespace agrotrack::estimation
