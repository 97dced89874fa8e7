#pragma once

#include "agrotrack/dynamics/vehicle.hpp"
#include "agrotrack/units.hpp"

namespace agrotrack::dynamics {

/// How the steering command reaches the front wheels.
enum class SteeringInput {
  ideal,     // delta follows the (saturated) command instantly
  position,  // servo: first-order lag toward an angle command, dead-band, rate limit
  valve,     // electro-hydraulic valve: command is a voltage in [0, 12] V, 6 V neutral
};

struct SteeringActuatorParams {
  SteeringInput input = SteeringInput::position;
  double tau = 0.15;                         // lag time constant [s]
  double dead_band = deg2rad(0.5);           // position mode: angle error dead-band [rad]
  double rate_limit = deg2rad(55.0);         // [rad/s]
  double max_angle = deg2rad(45.0);          // [rad]
  double resolution = deg2rad(1.0);          // potentiometer resolution [rad]
  double valve_neutral = 6.0;                // [V]
  double valve_span = 6.0;                   // volts from neutral to full flow
  double valve_dead_band = 0.175;            // [V], about 0.5 deg of PI error at 20 V/rad
};

struct PlantConfig {
  VehicleParams vehicle = VehicleParams::reference_tractor();
  SteeringActuatorParams steering{};
  double tau_speed = 1.0;   // pedal command -> v_x lag [s]
  double max_substep = 0.01;
};

/// delta_cmd is an angle for the ideal/position actuators and a valve voltage
/// for the valve actuator; speed_cmd is the pedal command expressed in m/s.
struct PlantInput {
  double delta_cmd = 0.0;
  double speed_cmd = 0.0;
};

/// Time derivative of the rigid-body and tire states for the held steering
/// angle state.delta. The delta/delta_rate components are zero: the actuator
/// is advanced separately by steering_actuator_step.
TractorState plant_derivative(const TractorState& state, const PlantInput& input, const PlantConfig& config);

/// Advances (delta, delta_rate) of the steering mechanism by h seconds.
TractorState steering_actuator_step(const TractorState& state, double delta_cmd,
                                    const SteeringActuatorParams& params, double h);

/// Advances the plant by dt using fixed RK4 substeps of at most max_substep.
/// Each substep moves the steering actuator first, then integrates the body.
/// Throws ErrorKind::integration_blowup naming the first non-finite field.
TractorState integrate_plant(const TractorState& state, const PlantInput& input, const PlantConfig& config, double dt);

/// Potentiometer reading of the steering angle, quantized to the resolution.
double measure_steering(double delta, const SteeringActuatorParams& params);

}  // namespace agrotrack::dynamics
