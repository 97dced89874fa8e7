#pragma once

#include <cstdint>
#include <optional>

#include "agrotrack/control/kinematic.hpp"
#include "agrotrack/control/mpc.hpp"
#include "agrotrack/control/pid.hpp"
#include "agrotrack/dynamics/linear_models.hpp"
#include "agrotrack/dynamics/plant.hpp"
#include "agrotrack/harness/sim_log.hpp"

namespace agrotrack::harness {

enum class PlantKind {
  nonlinear,  // rigid body with relaxation-length tires
  linear,     // linear yaw model feeding the rear-axle kinematics
};

struct MpcSettings {
  int np = 8;
  int nc = 3;
  double q = 0.5;
  double r = 1.0;
  double u_max_deg = 45.0;
  double du_max_deg_s = 55.0;
  dynamics::YawModel model = dynamics::YawModel::EMP2;
  control::InputPenalty penalty = control::InputPenalty::steady_state_deviation;
};

struct TrajectorySettings {
  double speed = 1.0;
  double straight_len = 20.0;
  double turn_radius = 5.0;
  int laps = 2;
};

struct NoiseSettings {
  bool enabled = true;
  double gps_pos_sigma = 0.02;   // [m]
  double gps_vel_sigma = 0.02;   // [m/s]
  double gyro_sigma = 0.005;     // [rad/s]
  double drift_sigma = 0.0;      // stationary std of the correlated GPS position error [m]
  double drift_tau = 60.0;       // its correlation time [s]
  std::uint64_t seed = 1;
};

struct EstimationSettings {
  double kf_q = 1e-4;
  double ekf_q_pos = 1e-4;
  double ekf_q_psi = 1e-3;
  double gps_pos_var = 0.02 * 0.02;
  double gps_vel_var = 0.02 * 0.02;
  double heading_var = 0.02 * 0.02;
  double speed_gate = 0.2;
};

struct SimSettings {
  double Ts = 0.05;
  std::optional<double> duration;  // defaults to the trajectory laps
  PlantKind plant = PlantKind::nonlinear;
  dynamics::YawModel linear_model = dynamics::YawModel::EMP2;  // used by the linear plant
  bool rolling_start = true;  // start on the reference at the reference speed
};

struct ExperimentConfig {
  dynamics::PlantConfig plant{};
  MpcSettings mpc{};
  control::PidGains speed_pid = control::speed_pid_defaults();
  control::PidGains steering_pi = control::steering_pi_defaults();
  control::KinematicGains kinematic{};
  TrajectorySettings trajectory{};
  NoiseSettings noise{};
  EstimationSettings estimation{};
  SimSettings sim{};

  /// The closed-loop scenario used for tracking acceptance: nonlinear plant,
  /// valve-driven steering and GPS noise.
  static ExperimentConfig defaults();
};

/// Discrete prediction model for the yaw MPC at the trajectory speed.
dynamics::StateSpace mpc_model(const ExperimentConfig& cfg);

/// Runs the 20 Hz loop: GPS -> KF -> EKF -> kinematic law -> {speed PID, yaw
/// MPC} -> steering PI -> plant. Deterministic for a given seed. Module errors
/// are rethrown with the step index and module name prepended.
SimLog run_experiment(const ExperimentConfig& cfg);

}  // namespace agrotrack::harness
