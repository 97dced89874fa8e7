#pragma once

#include <Eigen/Dense>

#include "agrotrack/dynamics/vehicle.hpp"
#include "agrotrack/estimation/kalman.hpp"

namespace agrotrack::estimation {

inline constexpr double kHeadingSpeedGate = 0.2;  // [m/s]

/// Pose of the rear-axle point (x, y, psi) with its covariance and noise models.
/// R holds the variances of (x, y, pseudo-heading).
struct EkfState {
  Eigen::Vector3d x_hat = Eigen::Vector3d::Zero();
  Eigen::Matrix3d P = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d Q = Eigen::Vector3d(1e-4, 1e-4, 1e-3).asDiagonal();
  Eigen::Matrix3d R = Eigen::Vector3d(0.02 * 0.02, 0.02 * 0.02, 0.02 * 0.02).asDiagonal();
  bool heading_gated = false;  // last update skipped the heading because the fix was too slow
};

/// Rear-axle kinematic step: position advances along psi, heading by v tan(delta) / L.
Eigen::Vector3d ekf_motion(const Eigen::Vector3d& pose, double v_x, double delta, double wheelbase, double Ts);

/// Jacobian of ekf_motion with respect to (x, y, psi).
Eigen::Matrix3d ekf_motion_jacobian(const Eigen::Vector3d& pose, double v_x, double Ts);

/// Throws ErrorKind::domain when Ts <= 0 or |delta| >= 90 deg.
EkfState ekf_predict(const EkfState& state, double v_x, double delta, const dynamics::VehicleParams& params, double Ts);

/// Position update plus a heading pseudo-measurement atan2(v_y, v_x) of the GPS
/// velocity when its speed reaches kHeadingSpeedGate; below the gate only the
/// position is used and heading_gated is set. Joseph-form covariance.
EkfState ekf_update(const EkfState& state, const GpsFix& z, double speed_gate = kHeadingSpeedGate);

}  // namespace agrotrack::estimation
