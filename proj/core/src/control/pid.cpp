#include "agrotrack/control/pid.hpp"

#include <algorithm>

#include "agrotrack/errors.hpp"

namespace agrotrack::control {

void PidGains::validate() const {
  if (!(out_min < out_max)) fail(ErrorKind::config, "pid: require out_min < out_max");
  if (bias < out_min || bias > out_max) fail(ErrorKind::config, "pid: bias outside the output range");
  if (anti_windup < 0.0) fail(ErrorKind::config, "pid: anti-windup coefficient must be non-negative");
}

PidGains speed_pid_defaults() {
  return {.kp = 1.5, .ki = 0.4, .kd = 0.0, .out_min = 0.0, .out_max = 3.0, .anti_windup = 1.0, .bias = 0.0};
}

PidGains steering_pi_defaults() {
  return {.kp = 20.0, .ki = 5.0, .kd = 0.0, .out_min = 0.0, .out_max = 12.0, .anti_windup = 0.25, .bias = 6.0};
}

PidController::PidController(PidGains gains) : gains_(gains) { gains_.validate(); }

void PidController::reset() {
  integral_ = 0.0;
  prev_measurement_ = 0.0;
  primed_ = false;
}

void PidController::preload(double output) {
  integral_ = std::clamp(output, gains_.out_min, gains_.out_max) - gains_.bias;
}

double PidController::step(double setpoint, double measurement, double Ts) {
  if (!(Ts > 0.0)) fail(ErrorKind::domain, "pid: sample time must be positive");
  const double error = setpoint - measurement;
  const double derivative = primed_ ? -(measurement - prev_measurement_) / Ts : 0.0;
  const double raw = gains_.bias + gains_.kp * error + integral_ + gains_.kd * derivative;
  const double out = std::clamp(raw, gains_.out_min, gains_.out_max);
  integral_ += Ts * (gains_.ki * error + gains_.anti_windup * (out - raw));
  prev_measurement_ = measurement;
  primed_ = true;
  return out;
}

}  // namespace agrotrack::control
