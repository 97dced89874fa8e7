#include "agrotrack/harness/experiment.hpp"

#include <cmath>
#include <random>
#include <string>

#include "agrotrack/control/discretize.hpp"
#include "agrotrack/errors.hpp"
#include "agrotrack/estimation/ekf.hpp"
#include "agrotrack/estimation/kalman.hpp"
#include "agrotrack/units.hpp"

namespace agrotrack::harness {
namespace {

template <class F>
auto guarded(long step, const char* module, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), "step " + std::to_string(step) + " [" + module + "]: " + e.what());
  }
}

// Linear yaw model driving the rear-axle kinematics.
class LinearPlant {
 public:
  LinearPlant(const ExperimentConfig& cfg, const dynamics::TractorState& init)
      : cfg_(cfg),
        model_(control::discretize(cfg.sim.linear_model == dynamics::YawModel::EMP2
                                       ? dynamics::ss_from_tf(dynamics::empirical_second_order())
                                       : dynamics::linearize_yaw(cfg.plant.vehicle, cfg.trajectory.speed,
                                                                 cfg.sim.linear_model),
                                   cfg.sim.Ts)),
        z_(Eigen::VectorXd::Zero(model_.states())),
        state_(init) {
    const double l_r = cfg.plant.vehicle.l_r();
    psi_ = init.psi;
    x_r_ = init.x - l_r * std::cos(init.psi);
    y_r_ = init.y - l_r * std::sin(init.psi);
    sync();
  }

  const dynamics::TractorState& state() const { return state_; }

  void advance(const dynamics::PlantInput& in, double Ts) {
    constexpr int kSub = 10;
    const double h = Ts / kSub;
    const double gamma0 = state_.gamma;
    for (int i = 0; i < kSub; ++i) state_ = dynamics::steering_actuator_step(state_, in.delta_cmd, cfg_.plant.steering, h);
    z_ = model_.A * z_ + model_.B.col(0) * state_.delta;
    const double gamma1 = (model_.C * z_)(0, 0);
    const double v0 = state_.v_x;
    const double v1 = in.speed_cmd + (v0 - in.speed_cmd) * std::exp(-Ts / cfg_.plant.tau_speed);
    for (int i = 0; i < kSub; ++i) {
      const double f = (i + 0.5) / kSub;
      const double v = v0 + f * (v1 - v0);
      const double g = gamma0 + f * (gamma1 - gamma0);
      const double psi_mid = psi_ + 0.5 * h * g;
      x_r_ += h * v * std::cos(psi_mid);
      y_r_ += h * v * std::sin(psi_mid);
      psi_ += h * g;
    }
    state_.v_x = v1;
    state_.gamma = gamma1;
    sync();
  }

 private:
  void sync() {
    const double l_r = cfg_.plant.vehicle.l_r();
    state_.psi = psi_ = wrap_angle(psi_);
    state_.x = x_r_ + l_r * std::cos(psi_);
    state_.y = y_r_ + l_r * std::sin(psi_);
    state_.v_y = l_r * state_.gamma;
  }

  const ExperimentConfig& cfg_;
  dynamics::StateSpace model_;
  Eigen::VectorXd z_;
  dynamics::TractorState state_;
  double x_r_ = 0.0, y_r_ = 0.0, psi_ = 0.0;
};

class GpsNoise {
 public:
  GpsNoise(const NoiseSettings& n, double Ts) : n_(n), rng_(n.seed), a_(n.drift_tau > 0 ? std::exp(-Ts / n.drift_tau) : 0.0) {}

  estimation::GpsFix corrupt(estimation::GpsFix f) {
    if (!n_.enabled) return f;
    if (n_.drift_sigma > 0.0) {
      const double b = n_.drift_sigma * std::sqrt(1.0 - a_ * a_);
      drift_x_ = a_ * drift_x_ + b * unit_(rng_);
      drift_y_ = a_ * drift_y_ + b * unit_(rng_);
    }
    f.x += n_.gps_pos_sigma * unit_(rng_) + drift_x_;
    f.y += n_.gps_pos_sigma * unit_(rng_) + drift_y_;
    f.v_x += n_.gps_vel_sigma * unit_(rng_);
    f.v_y += n_.gps_vel_sigma * unit_(rng_);
    return f;
  }

  double gyro(double gamma) { return n_.enabled ? gamma + n_.gyro_sigma * unit_(rng_) : gamma; }

 private:
  NoiseSettings n_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> unit_{0.0, 1.0};
  double a_;
  double drift_x_ = 0.0, drift_y_ = 0.0;
};

// GPS antenna sits on the rear axle.
estimation::GpsFix antenna_truth(const dynamics::TractorState& s, double l_r) {
  const double c = std::cos(s.psi), sn = std::sin(s.psi);
  return {s.x - l_r * c, s.y - l_r * sn, s.v_x * c - s.v_y * sn + s.gamma * l_r * sn,
          s.v_x * sn + s.v_y * c - s.gamma * l_r * c};
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.plant.steering.input = dynamics::SteeringInput::valve;
  return cfg;
}

dynamics::StateSpace mpc_model(const ExperimentConfig& cfg) {
  const auto continuous = cfg.mpc.model == dynamics::YawModel::EMP2
                              ? dynamics::ss_from_tf(dynamics::empirical_second_order())
                              : dynamics::linearize_yaw(cfg.plant.vehicle, cfg.trajectory.speed, cfg.mpc.model);
  return control::discretize(continuous, cfg.sim.Ts);
}

SimLog run_experiment(const ExperimentConfig& cfg) {
  const double Ts = cfg.sim.Ts;
  if (!(Ts > 0.0)) fail(ErrorKind::config, "sim: Ts must be positive");
  const auto& vehicle = cfg.plant.vehicle;
  const double l_r = vehicle.l_r();

  const FigureEight eight(cfg.trajectory.speed, cfg.trajectory.straight_len, cfg.trajectory.turn_radius);
  const double duration = cfg.sim.duration.value_or(cfg.trajectory.laps * eight.lap_time());
  const auto steps = static_cast<long>(std::floor(duration / Ts + 1e-9));

  control::MpcConfig mpc_cfg{mpc_model(cfg)};
  mpc_cfg.np = cfg.mpc.np;
  mpc_cfg.nc = cfg.mpc.nc;
  mpc_cfg.q = cfg.mpc.q;
  mpc_cfg.r = cfg.mpc.r;
  mpc_cfg.u_max = deg2rad(cfg.mpc.u_max_deg);
  mpc_cfg.u_min = -mpc_cfg.u_max;
  mpc_cfg.du_max = deg2rad(cfg.mpc.du_max_deg_s);
  mpc_cfg.du_min = -mpc_cfg.du_max;
  mpc_cfg.Ts = Ts;
  mpc_cfg.penalty = cfg.mpc.penalty;
  control::YawRateMpc mpc(mpc_cfg);
  control::PidController speed_pid(cfg.speed_pid);
  control::SteeringPi steering_pi(cfg.steering_pi);
  cfg.kinematic.validate();

  const TrajectoryPoint start = eight.at(0.0);
  dynamics::TractorState truth;
  truth.x = start.x_r;
  truth.y = start.y_r;
  truth.psi = std::atan2(start.ydot_r, start.xdot_r);
  truth.v_x = cfg.sim.rolling_start ? cfg.trajectory.speed : 0.0;
  if (cfg.sim.rolling_start) speed_pid.preload(truth.v_x);

  std::optional<LinearPlant> linear;
  if (cfg.sim.plant == PlantKind::linear) linear.emplace(cfg, truth);

  GpsNoise noise(cfg.noise, Ts);
  const auto& est = cfg.estimation;
  estimation::KfNoise kf_noise;
  kf_noise.Q = est.kf_q * Eigen::Matrix4d::Identity();
  kf_noise.R = Eigen::Vector4d(est.gps_pos_var, est.gps_vel_var, est.gps_pos_var, est.gps_vel_var).asDiagonal();

  estimation::KfState kf;
  estimation::EkfState ekf;
  ekf.Q = Eigen::Vector3d(est.ekf_q_pos, est.ekf_q_pos, est.ekf_q_psi).asDiagonal();
  ekf.R = Eigen::Vector3d(est.gps_pos_var, est.gps_pos_var, est.heading_var).asDiagonal();

  SimLog log;
  log.Ts = Ts;
  log.records.reserve(static_cast<std::size_t>(steps) + 1);

  double speed_est = truth.v_x;
  double delta_meas_prev = 0.0;
  for (long k = 0; k <= steps; ++k) {
    const double t = k * Ts;
    const TrajectoryPoint ref = eight.at(t);

    const estimation::GpsFix fix = noise.corrupt(antenna_truth(truth, l_r));
    const double gyro = noise.gyro(truth.gamma);
    const double delta_meas = dynamics::measure_steering(truth.delta, cfg.plant.steering);

    guarded(k, "kf", [&] {
      if (k == 0) {
        kf.x_hat = Eigen::Vector4d(fix.x, fix.v_x, fix.y, fix.v_y);
        kf.P = kf_noise.R;
      } else {
        kf = estimation::kf_step(kf, fix, Ts, kf_noise);
      }
      return 0;
    });
    guarded(k, "ekf", [&] {
      if (k == 0) {
        const auto a = antenna_truth(truth, l_r);
        ekf.x_hat = Eigen::Vector3d(a.x, a.y, truth.psi);
        ekf.P = Eigen::Vector3d(est.gps_pos_var, est.gps_pos_var, est.heading_var).asDiagonal();
      } else {
        ekf = estimation::ekf_predict(ekf, speed_est, delta_meas_prev, vehicle, Ts);
      }
      const estimation::GpsFix filtered{fix.x, fix.y, kf.x_hat(1), kf.x_hat(3)};
      ekf = estimation::ekf_update(ekf, filtered, est.speed_gate);
      return 0;
    });
    speed_est = std::hypot(kf.x_hat(1), kf.x_hat(3));

    const double psi_hat = ekf.x_hat(2);
    const control::Pose pose_cg{ekf.x_hat(0) + l_r * std::cos(psi_hat), ekf.x_hat(1) + l_r * std::sin(psi_hat), psi_hat};
    const auto cmd = guarded(k, "kinematic", [&] {
      return control::kinematic_control(pose_cg, {ref.x_r, ref.y_r, ref.xdot_r, ref.ydot_r}, cfg.kinematic, l_r);
    });
    const double pedal = guarded(k, "speed_pid", [&] { return speed_pid.step(cmd.v_x, speed_est, Ts); });
    const control::MpcStep yaw = guarded(k, "mpc", [&] { return mpc.step(gyro, cmd.gamma); });
    const double steer_cmd = guarded(k, "steering_pi", [&] {
      return cfg.plant.steering.input == dynamics::SteeringInput::valve ? steering_pi.step(yaw.delta_desired, delta_meas, Ts)
                                                                        : yaw.delta_desired;
    });

    SimRecord r;
    r.t = t;
    r.x = truth.x;
    r.y = truth.y;
    r.psi = truth.psi;
    r.v_x = truth.v_x;
    r.v_y = truth.v_y;
    r.gamma = truth.gamma;
    r.x_hat = pose_cg.x;
    r.y_hat = pose_cg.y;
    r.psi_hat = psi_hat;
    r.x_r = ref.x_r;
    r.y_r = ref.y_r;
    r.delta_cmd = yaw.delta_desired;
    r.delta_act = truth.delta;
    r.e_x = ref.x_r - truth.x;
    r.e_y = ref.y_r - truth.y;
    r.v_x_d = cmd.v_x;
    r.gamma_d = cmd.gamma;
    r.speed_ref = cfg.trajectory.speed;
    r.segment = ref.segment;
    log.records.push_back(r);

    if (k == steps) break;
    const dynamics::PlantInput input{steer_cmd, pedal};
    guarded(k, "plant", [&] {
      if (linear) {
        linear->advance(input, Ts);
        truth = linear->state();
      } else {
        truth = dynamics::integrate_plant(truth, input, cfg.plant, Ts);
        truth.psi = wrap_angle(truth.psi);
      }
      return 0;
    });
    delta_meas_prev = delta_meas;
  }
  return log;
}

}  // namespace agrotrack::harness
