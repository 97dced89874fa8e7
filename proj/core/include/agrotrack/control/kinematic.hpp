#pragma once

namespace agrotrack::control {

struct KinematicGains {
  double k_c = 0.8;  // [1/m]
  double k_s = 0.8;  // [m/s]

  /// Throws ErrorKind::config unless both gains are positive.
  void validate() const;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
};

struct KinematicReference {
  double x_r = 0.0;
  double y_r = 0.0;
  double xdot_r = 0.0;
  double ydot_r = 0.0;
};

struct KinematicCommand {
  double v_x = 0.0;    // desired longitudinal speed [m/s]
  double gamma = 0.0;  // desired yaw rate [rad/s]
};

struct PlanarVelocity {
  double xdot = 0.0;
  double ydot = 0.0;
};

/// Velocity of the tracked point for body speed v_x and yaw rate gamma, with
/// the lateral velocity gamma * l_r.
PlanarVelocity kinematic_forward(double psi, double v_x, double gamma, double l_r);

/// Saturated inverse-kinematic tracking law. Throws ErrorKind::domain when l_r <= 0.
KinematicCommand kinematic_control(const Pose& pose, const KinematicReference& ref, const KinematicGains& gains,
                                   double l_r);

}  // namespace agrotrack::control
