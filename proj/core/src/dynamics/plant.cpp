#include "agrotrack/dynamics/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agrotrack/errors.hpp"

namespace agrotrack::dynamics {
namespace {

double dead_zone(double v, double width) {
  if (std::abs(v) <= width) return 0.0;
  return v > 0.0 ? v - width : v + width;
}

TractorState axpy(const TractorState& s, double h, const TractorState& d) {
  TractorState out = s;
  out.x += h * d.x;
  out.y += h * d.y;
  out.psi += h * d.psi;
  out.v_x += h * d.v_x;
  out.v_y += h * d.v_y;
  out.gamma += h * d.gamma;
  out.alpha_f += h * d.alpha_f;
  out.alpha_r += h * d.alpha_r;
  return out;
}

void check_finite(const TractorState& s) {
  const std::pair<const char*, double> fields[] = {
      {"x", s.x},         {"y", s.y},         {"psi", s.psi},         {"v_x", s.v_x},
      {"v_y", s.v_y},     {"gamma", s.gamma}, {"alpha_f", s.alpha_f}, {"alpha_r", s.alpha_r},
      {"delta", s.delta}, {"delta_rate", s.delta_rate}};
  for (const auto& [name, value] : fields)
    if (!std::isfinite(value)) fail(ErrorKind::integration_blowup, std::string("plant state field '") + name + "' is not finite");
}

}  // namespace

TractorState plant_derivative(const TractorState& s, const PlantInput& in, const PlantConfig& cfg) {
  const VehicleParams& p = cfg.vehicle;
  const double sin_psi = std::sin(s.psi), cos_psi = std::cos(s.psi);
  const double cos_delta = std::cos(s.delta);

  // Linear tire model; traction force neglected.
  const double f_lat_front = -p.c_alpha_f() * s.alpha_f;
  const double f_lat_rear = -p.c_alpha_r() * s.alpha_r;

  TractorState d;
  d.x = s.v_x * cos_psi - s.v_y * sin_psi;
  d.y = s.v_x * sin_psi + s.v_y * cos_psi;
  d.psi = s.gamma;
  d.v_x = (in.speed_cmd - s.v_x) / cfg.tau_speed;
  d.v_y = (f_lat_front * cos_delta + f_lat_rear) / p.mass() - s.v_x * s.gamma;
  d.gamma = (p.l_f() * f_lat_front * cos_delta - p.l_r() * f_lat_rear) / p.inertia();
  // Relaxation-length slip dynamics: no 1/v_x singularity.
  d.alpha_f = (s.v_y + p.l_f() * s.gamma - s.v_x * (s.delta + s.alpha_f)) / p.sigma_f();
  d.alpha_r = (s.v_y - p.l_r() * s.gamma - s.v_x * s.alpha_r) / p.sigma_r();
  d.delta = 0.0;
  d.delta_rate = 0.0;
  return d;
}

TractorState steering_actuator_step(const TractorState& s, double delta_cmd, const SteeringActuatorParams& a, double h) {
  TractorState out = s;
  switch (a.input) {
    case SteeringInput::ideal:
      out.delta = std::clamp(delta_cmd, -a.max_angle, a.max_angle);
      out.delta_rate = 0.0;
      break;
    case SteeringInput::position: {
      const double target = std::clamp(delta_cmd, -a.max_angle, a.max_angle);
      const double err = dead_zone(target - s.delta, a.dead_band);
      double step = err * (1.0 - std::exp(-h / a.tau));
      step = std::clamp(step, -a.rate_limit * h, a.rate_limit * h);
      out.delta = std::clamp(s.delta + step, -a.max_angle, a.max_angle);
      out.delta_rate = step / h;
      break;
    }
    case SteeringInput::valve: {
      const double volts = std::clamp(delta_cmd, a.valve_neutral - a.valve_span, a.valve_neutral + a.valve_span);
      const double opening = dead_zone(volts - a.valve_neutral, a.valve_dead_band) / (a.valve_span - a.valve_dead_band);
      const double target_rate = a.rate_limit * opening;
      double rate = s.delta_rate + (target_rate - s.delta_rate) * (1.0 - std::exp(-h / a.tau));
      rate = std::clamp(rate, -a.rate_limit, a.rate_limit);
      double delta = s.delta + rate * h;
      if (std::abs(delta) >= a.max_angle) {
        delta = std::copysign(a.max_angle, delta);
        rate = 0.0;  // end stop
      }
      out.delta = delta;
      out.delta_rate = rate;
      break;
    }
  }
  return out;
}

TractorState integrate_plant(const TractorState& state, const PlantInput& in, const PlantConfig& cfg, double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::domain, "integrate_plant: dt must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(dt / cfg.max_substep - 1e-9)));
  const double h = dt / n;
  TractorState s = state;
  for (int i = 0; i < n; ++i) {
    s = steering_actuator_step(s, in.delta_cmd, cfg.steering, h);
    const TractorState k1 = plant_derivative(s, in, cfg);
    const TractorState k2 = plant_derivative(axpy(s, 0.5 * h, k1), in, cfg);
    const TractorState k3 = plant_derivative(axpy(s, 0.5 * h, k2), in, cfg);
    const TractorState k4 = plant_derivative(axpy(s, h, k3), in, cfg);
    TractorState sum = k1;
    sum = axpy(sum, 2.0, k2);
    sum = axpy(sum, 2.0, k3);
    sum = axpy(sum, 1.0, k4);
    s = axpy(s, h / 6.0, sum);
    check_finite(s);
  }
  return s;
}

double measure_steering(double delta, const SteeringActuatorParams& a) {
  if (a.resolution <= 0.0) return delta;
  return a.resolution * std::round(delta / a.resolution);
}

}  // namespace agrotrack::dynamics
