#include "agrotrack/control/kinematic.hpp"

#include <cmath>

#include "agrotrack/errors.hpp"

namespace agrotrack::control {

void KinematicGains::validate() const {
  if (!(k_c > 0.0) || !(k_s > 0.0)) fail(ErrorKind::config, "kinematic: k_c and k_s must be positive");
}

PlanarVelocity kinematic_forward(double psi, double v_x, double gamma, double l_r) {
  const double c = std::cos(psi), s = std::sin(psi);
  return {c * v_x - l_r * s * gamma, s * v_x + l_r * c * gamma};
}

KinematicCommand kinematic_control(const Pose& pose, const KinematicReference& ref, const KinematicGains& gains,
                                   double l_r) {
  if (!(l_r > 0.0)) fail(ErrorKind::domain, "kinematic_control: l_r must be positive");
  const double e_x = ref.x_r - pose.x;
  const double e_y = ref.y_r - pose.y;
  const double xdot_d = ref.xdot_r + gains.k_s * std::tanh(gains.k_c * e_x);
  const double ydot_d = ref.ydot_r + gains.k_s * std::tanh(gains.k_c * e_y);
  const double c = std::cos(pose.psi), s = std::sin(pose.psi);
  return {c * xdot_d + s * ydot_d, (-s * xdot_d + c * ydot_d) / l_r};
}

}  // namespace agrotrack::control
