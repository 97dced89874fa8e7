#include "agrotrack/harness/pipelines.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <random>
#include <string>

#include "agrotrack/dynamics/linear_models.hpp"
#include "agrotrack/dynamics/plant.hpp"
#include "agrotrack/errors.hpp"
#include "agrotrack/sysid/validate.hpp"

namespace agrotrack::harness {

namespace {

FrfExperiment excite(const signals::MultisineSpec& spec) {
  spec.validate();
  FrfExperiment out;
  out.excitation = signals::generate_multisine(spec);
  out.u = out.excitation.signal;
  const double dt = 1.0 / spec.fs;
  out.t.resize(out.u.size());
  for (std::size_t k = 0; k < out.t.size(); ++k) out.t[k] = static_cast<double>(k) * dt;
  out.y.resize(out.u.size());
  return out;
}

constexpr int kSub = 10;

void simulate_linear(FrfExperiment& out, const dynamics::StateSpace& ss, const std::string& name, double fs) {
  const double worst = ss.A.eigenvalues().real().maxCoeff();
  if (worst >= 0.0)
    fail(ErrorKind::simulation_unstable, "frf: " + name + " model has a pole with real part " + std::to_string(worst));
  const double h = 1.0 / fs / kSub;
  const Eigen::VectorXd b = ss.B.col(0);
  auto f = [&](const Eigen::VectorXd& x, double t) -> Eigen::VectorXd { return ss.A * x + b * out.excitation.value(t); };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.A.rows());
  for (std::size_t k = 0; k < out.y.size(); ++k) {
    out.y[k] = (ss.C * x)(0, 0);
    for (int i = 0; i < kSub; ++i) {
      const double t = out.t[k] + i * h;
      const Eigen::VectorXd k1 = f(x, t);
      const Eigen::VectorXd k2 = f(x + 0.5 * h * k1, t + 0.5 * h);
      const Eigen::VectorXd k3 = f(x + 0.5 * h * k2, t + 0.5 * h);
      const Eigen::VectorXd k4 = f(x + h * k3, t + h);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
}

void finish(FrfExperiment& out, const FrfSettings& frf) {
  if (frf.output_noise > 0.0) {
    std::mt19937_64 rng(frf.spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, frf.output_noise);
    for (auto& v : out.y) v += noise(rng);
  }
  signals::FrfOptions options;
  options.discard_first_period = frf.discard_first_period;
  out.frf = signals::estimate_frf(out.u, out.y, frf.spec, out.excitation.excited_lines, options);
}

}  // namespace

FrfExperiment run_frf_experiment(const RunConfig& cfg) {
  const auto& spec = cfg.frf.spec;
  if (!(cfg.frf.speed > 0.0)) fail(ErrorKind::config, "frf: speed must be positive");
  FrfExperiment out = excite(spec);
  const std::size_t n = out.u.size();
  const double h = 1.0 / spec.fs / kSub;
  if (cfg.frf.plant == PlantKind::linear) {
    const auto ss = cfg.frf.model == dynamics::YawModel::EMP2
                        ? dynamics::ss_from_tf(dynamics::empirical_second_order())
                        : dynamics::linearize_yaw(cfg.experiment.plant.vehicle, cfg.frf.speed, cfg.frf.model);
    simulate_linear(out, ss, dynamics::to_string(cfg.frf.model), spec.fs);
  } else {
    dynamics::PlantConfig plant = cfg.experiment.plant;
    if (!cfg.frf.through_actuator)
      plant.steering.input = dynamics::SteeringInput::ideal;
    else if (plant.steering.input == dynamics::SteeringInput::valve)
      fail(ErrorKind::config, "frf: through_actuator needs an angle-commanded actuator, not the valve");
    dynamics::TractorState s;
    s.v_x = cfg.frf.speed;
    for (std::size_t k = 0; k < n; ++k) {
      out.y[k] = s.gamma;
      for (int i = 0; i < kSub; ++i) {
        const double delta = out.excitation.value(out.t[k] + (i + 0.5) * h);
        s = dynamics::integrate_plant(s, {.delta_cmd = delta, .speed_cmd = cfg.frf.speed}, plant, h);
      }
    }
  }
  finish(out, cfg.frf);
  return out;
}

FrfExperiment run_frf_experiment(const dynamics::RationalTF& plant, const FrfSettings& frf) {
  FrfExperiment out = excite(frf.spec);
  simulate_linear(out, dynamics::ss_from_tf(plant), "transfer-function", frf.spec.fs);
  finish(out, frf);
  return out;
}

Identification identify(const signals::FrfMeasurement& frf, const RunConfig& cfg, double v_x,
                        const FrfExperiment* record) {
  sysid::FitConfig fit_cfg;
  fit_cfg.order = cfg.sysid.order;
  fit_cfg.weighting = cfg.sysid.weighting;
  fit_cfg.max_iter = cfg.sysid.max_iter;
  fit_cfg.tol = cfg.sysid.tol;
  fit_cfg.validate();

  Identification out{sysid::fit_tf(frf, fit_cfg), std::nullopt, std::nullopt, {}, std::nullopt};
  if (cfg.sysid.screen_structures) out.structure = sysid::structure_screen(frf, cfg.sysid.weighting);

  if (cfg.sysid.extract_physical) {
    try {
      const sysid::ModelOrder fourth{2, 4};
      dynamics::RationalTF source = out.fit.tf;
      if (!(cfg.sysid.order == fourth)) {
        sysid::FitConfig c4 = fit_cfg;
        c4.order = fourth;
        source = sysid::fit_tf(frf, c4).tf;
      }
      const auto& vehicle = cfg.experiment.plant.vehicle;
      out.extraction = sysid::extract_physical_params(
          source, {.mass = vehicle.mass(), .l_f = vehicle.l_f(), .l_r = vehicle.l_r(), .inertia = vehicle.inertia()}, v_x);
    } catch (const Error& e) {
      out.extraction_failure = e.what();
    }
  }

  if (record != nullptr) {
    const std::size_t discard =
        cfg.frf.discard_first_period ? static_cast<std::size_t>(cfg.frf.spec.period_samples()) : 0;
    out.validation_rms = sysid::validate_time_domain(out.fit.tf, record->u, record->y, cfg.frf.spec.fs, discard);
  }
  return out;
}

std::string format_identification(const Identification& id) {
  auto poly = [](const std::vector<double>& c) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " " : "") + fmt::format("{:.10g}", c[i]);
    return s;
  };
  std::string out = "Identification report\n";
  out += fmt::format("  fit: num [{}] den [{}]\n", poly(id.fit.tf.num()), poly(id.fit.tf.den()));
  out += fmt::format("  residual {:.6g} after {} iterations ({})\n", id.fit.residual, id.fit.iterations,
                     id.fit.converged ? "converged" : "not converged");
  if (id.structure) {
    out += "  structure ranking:\n";
    for (const auto& c : id.structure->ranking) {
      out += fmt::format("    {:<5} ({},{}) score {:.6g}{}{}\n", c.name, c.order.n_num, c.order.n_den, c.score,
                         c.rejected ? " rejected: resonance peak" : "", c.failure.empty() ? "" : " failed: " + c.failure);
    }
    if (id.structure->peak)
      out += fmt::format("  resonance peak at {:.4f} Hz, |G| {:.4g}\n", id.structure->peak->freq_hz,
                         id.structure->peak->magnitude);
  }
  if (id.extraction) {
    const auto& p = id.extraction->params;
    const auto& r = id.extraction->report;
    out += fmt::format("  tires: C_af {:.6g} N/rad, C_ar {:.6g} N/rad, sigma_f {:.6g} m, sigma_r {:.6g} m\n", p.c_alpha_f(),
                       p.c_alpha_r(), p.sigma_f(), p.sigma_r());
    out += fmt::format("  {} of {} starts agree; {}{}\n", r.agreeing_starts, r.starts.size(),
                       r.realistic ? "realistic" : "not realistic", r.ambiguous ? ", ambiguous" : "");
  } else if (!id.extraction_failure.empty()) {
    out += "  tire extraction failed: " + id.extraction_failure + "\n";
  }
  if (id.validation_rms) out += fmt::format("  time-domain yaw-rate RMS error {:.6g} rad/s\n", *id.validation_rms);

  out += "\n";
  out += fmt::format("fit_residual={:.17g}\nfit_converged={}\n", id.fit.residual, id.fit.converged ? 1 : 0);
  out += fmt::format("fit_num={}\nfit_den={}\n", poly(id.fit.tf.num()), poly(id.fit.tf.den()));
  if (id.extraction) {
    const auto& p = id.extraction->params;
    out += fmt::format("c_alpha_f={:.17g}\nc_alpha_r={:.17g}\nsigma_f={:.17g}\nsigma_r={:.17g}\nrealistic={}\n",
                       p.c_alpha_f(), p.c_alpha_r(), p.sigma_f(), p.sigma_r(), id.extraction->report.realistic ? 1 : 0);
  }
  if (id.validation_rms) out += fmt::format("validation_rms={:.17g}\n", *id.validation_rms);
  return out;
}

}  // namespace agrotrack::harness
