#pragma once

namespace agrotrack::control {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double out_min = -1.0;
  double out_max = 1.0;
  double anti_windup = 1.0;  // back-calculation coefficient on (clamped - raw)
  double bias = 0.0;         // output at zero error and empty integrator

  /// Throws ErrorKind::config unless out_min < out_max and bias lies inside.
  void validate() const;
};

/// Longitudinal speed loop: pedal command in m/s, kp 1.5, ki 0.4.
PidGains speed_pid_defaults();

/// Steering valve PI: 0-12 V with 6 V neutral, kp 20 V/rad, ki 5 V/(rad s).
PidGains steering_pi_defaults();

/// Positional PID with derivative on measurement, output clamp and
/// back-calculation anti-windup.
class PidController {
 public:
  explicit PidController(PidGains gains);

  /// Throws ErrorKind::domain when Ts <= 0.
  double step(double setpoint, double measurement, double Ts);
  void reset();
  /// Sets the integrator so that zero error yields `output` (bumpless start).
  void preload(double output);

  const PidGains& gains() const { return gains_; }
  double integrator() const { return integral_; }

 private:
  PidGains gains_;
  double integral_ = 0.0;
  double prev_measurement_ = 0.0;
  bool primed_ = false;
};

/// Valve voltage for the steering PI; a thin alias over PidController kept for
/// call-site clarity.
class SteeringPi {
 public:
  explicit SteeringPi(PidGains gains = steering_pi_defaults()) : pid_(gains) {}
  double step(double delta_desired, double delta_measured, double Ts) { return pid_.step(delta_desired, delta_measured, Ts); }
  void reset() { pid_.reset(); }

 private:
  PidController pid_;
};

}  // namespace agrotrack::control
