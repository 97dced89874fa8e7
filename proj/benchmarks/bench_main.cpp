#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <complex>
#include <vector>

#include "agrotrack/control/discretize.hpp"
#include "agrotrack/control/kinematic.hpp"
#include "agrotrack/control/mpc.hpp"
#include "agrotrack/control/pid.hpp"
#include "agrotrack/dynamics/linear_models.hpp"
#include "agrotrack/estimation/ekf.hpp"
#include "agrotrack/estimation/kalman.hpp"
#include "agrotrack/harness/experiment.hpp"
#include "agrotrack/signals/frf.hpp"
#include "agrotrack/sysid/fit.hpp"
#include "agrotrack/units.hpp"

using namespace agrotrack;

namespace {

control::MpcConfig default_mpc() {
  control::MpcConfig cfg{control::discretize(dynamics::ss_from_tf(dynamics::empirical_second_order()), 0.05)};
  return cfg;
}

void BM_MpcStep(benchmark::State& state) {
  control::YawRateMpc mpc(default_mpc());
  double gamma = 0.0;
  int k = 0;
  for (auto _ : state) {
    const double ref = (k++ / 40) % 2 ? 0.3 : -0.3;
    const auto out = mpc.step(gamma, ref);
    gamma = 0.9 * gamma + 0.1 * out.delta_desired;
    benchmark::DoNotOptimize(out.delta_desired);
  }
}
BENCHMARK(BM_MpcStep);

void BM_KalmanStep(benchmark::State& state) {
  estimation::KfState kf;
  const estimation::KfNoise noise;
  double t = 0.0;
  for (auto _ : state) {
    t += 0.05;
    kf = estimation::kf_step(kf, {t, 1.0, 0.5 * t, 0.5}, 0.05, noise);
    benchmark::DoNotOptimize(kf.x_hat);
  }
}
BENCHMARK(BM_KalmanStep);

void BM_EkfStep(benchmark::State& state) {
  const auto vehicle = dynamics::VehicleParams::reference_tractor();
  estimation::EkfState ekf;
  double t = 0.0;
  for (auto _ : state) {
    t += 0.05;
    ekf = estimation::ekf_predict(ekf, 1.0, 0.05, vehicle, 0.05);
    ekf = estimation::ekf_update(ekf, {t, 0.0, 1.0, 0.0});
    benchmark::DoNotOptimize(ekf.x_hat);
  }
}
BENCHMARK(BM_EkfStep);

signals::FrfMeasurement sampled_frf(const dynamics::RationalTF& tf) {
  std::vector<double> f;
  std::vector<std::complex<double>> g;
  for (int k = 1; k <= 100; ++k) {
    f.push_back(0.02 * k);
    g.push_back(tf(std::complex<double>(0.0, 2.0 * std::numbers::pi * 0.02 * k)));
  }
  return signals::frf_from_samples(f, g);
}

void BM_FitSecondOrder(benchmark::State& state) {
  const auto frf = sampled_frf(dynamics::empirical_second_order());
  sysid::FitConfig cfg;
  cfg.order = {0, 2};
  for (auto _ : state) benchmark::DoNotOptimize(sysid::fit_tf(frf, cfg).residual);
}
BENCHMARK(BM_FitSecondOrder)->Unit(benchmark::kMillisecond);

void BM_FitFourthOrder(benchmark::State& state) {
  const auto tf = dynamics::tf_from_ss(
      dynamics::linearize_yaw(dynamics::VehicleParams::reference_tractor(), 1.0, dynamics::YawModel::RLFR));
  const auto frf = sampled_frf(tf);
  sysid::FitConfig cfg;
  cfg.order = {2, 4};
  for (auto _ : state) benchmark::DoNotOptimize(sysid::fit_tf(frf, cfg).residual);
}
BENCHMARK(BM_FitFourthOrder)->Unit(benchmark::kMillisecond);

// Estimation, kinematic law, MPC and both PIDs for one 20 Hz tick.
void BM_ControlStep(benchmark::State& state) {
  const auto vehicle = dynamics::VehicleParams::reference_tractor();
  const double Ts = 0.05, l_r = vehicle.l_r();
  control::YawRateMpc mpc(default_mpc());
  control::PidController speed(control::speed_pid_defaults());
  control::SteeringPi steer;
  const estimation::KfNoise kf_noise;
  estimation::KfState kf;
  estimation::EkfState ekf;
  double t = 0.0;
  for (auto _ : state) {
    t += Ts;
    const estimation::GpsFix fix{t, 1.0, 0.1 * std::sin(t), 0.1 * std::cos(t)};
    kf = estimation::kf_step(kf, fix, Ts, kf_noise);
    ekf = estimation::ekf_predict(ekf, 1.0, 0.01, vehicle, Ts);
    ekf = estimation::ekf_update(ekf, {fix.x, fix.y, kf.x_hat(1), kf.x_hat(3)});
    const control::Pose pose{ekf.x_hat(0) + l_r * std::cos(ekf.x_hat(2)), ekf.x_hat(1) + l_r * std::sin(ekf.x_hat(2)),
                             ekf.x_hat(2)};
    const auto cmd = control::kinematic_control(pose, {t, 0.0, 1.0, 0.0}, {}, l_r);
    benchmark::DoNotOptimize(speed.step(cmd.v_x, 1.0, Ts));
    const auto yaw = mpc.step(0.0, cmd.gamma);
    benchmark::DoNotOptimize(steer.step(yaw.delta_desired, 0.0, Ts));
  }
}
BENCHMARK(BM_ControlStep);

void BM_FigureEightRun(benchmark::State& state) {
  auto cfg = harness::ExperimentConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_experiment(cfg).records.size());
}
BENCHMARK(BM_FigureEightRun)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
