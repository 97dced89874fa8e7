// agrotrack: run the tracking simulation, the identification pipeline, the FRF
// experiment, or analyze an exported log.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "agrotrack/errors.hpp"
#include "agrotrack/harness/config.hpp"
#include "agrotrack/harness/csv.hpp"
#include "agrotrack/harness/experiment.hpp"
#include "agrotrack/harness/metrics.hpp"
#include "agrotrack/harness/pipelines.hpp"
#include "agrotrack/signals/nonlinearity.hpp"

namespace fs = std::filesystem;
using namespace agrotrack;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kThresholdBreach = 4 };

// Largest fit residual, relative to the measured FRF energy, accepted by `identify --assert`.
constexpr double kFitLimit = 1e-2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "csv";
  bool assert_limits = false;
};

harness::RunConfig load(const std::string& path) {
  return path.empty() ? harness::RunConfig{} : harness::load_config(path);
}

std::string out_path(const Common& c, const std::string& name) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory '" + c.out_dir + "': " + ec.message());
  return (fs::path(c.out_dir) / name).string();
}

int simulate(const std::string& config, const Common& c) {
  auto cfg = load(config);
  if (c.seed) cfg.experiment.noise.seed = *c.seed;
  const auto log = harness::run_experiment(cfg.experiment);
  const auto report = harness::metrics(log);
  harness::export_csv(log, out_path(c, "log.csv"));
  harness::export_report(report, out_path(c, "report.txt"));
  std::cout << harness::format_report(report);
  if (c.assert_limits && !harness::within_tracking_limits(report)) {
    std::cerr << fmt::format("tracking limits breached: straight {:.4f} m (< {}), curved {:.4f} m (< {}), {} violations\n",
                             report.straight.max, harness::kStraightErrorLimit, report.curved.max,
                             harness::kCurvedErrorLimit, report.constraint_violations);
    return kThresholdBreach;
  }
  return kOk;
}

std::string format_nonlinearity(const signals::NonlinearityReport& nl) {
  std::string out = "Nonlinearity detection\n";
  for (const auto& b : nl.bands)
    out += fmt::format("  {:8.4f}-{:8.4f} Hz  even/excited {:.4g}  odd/excited {:.4g}\n", b.f_lo, b.f_hi, b.even_ratio,
                       b.odd_ratio);
  out += nl.flag_frequency ? fmt::format("  nonlinear above {:.4f} Hz\n", *nl.flag_frequency)
                           : std::string("  no band exceeds the excited level\n");
  return out;
}

int frf(const std::string& config, const Common& c) {
  auto cfg = load(config);
  if (c.seed) cfg.frf.spec.seed = *c.seed;
  const auto ex = harness::run_frf_experiment(cfg);
  harness::write_text(out_path(c, "frf.csv"), harness::frf_to_csv(ex.frf));
  harness::write_text(out_path(c, "record.csv"), harness::record_to_csv(ex.u, ex.y, cfg.frf.spec.fs));
  std::cout << fmt::format("{} excited lines, {:.4f}-{:.4f} Hz\n", ex.frf.size(), ex.frf.freqs.front(), ex.frf.freqs.back());
  for (const auto& w : ex.frf.warnings) std::cout << "warning: " << w << "\n";
  std::optional<signals::NonlinearityReport> nl;
  try {
    nl = signals::nonlinearity_report(ex.frf);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::grid_type) throw;
    std::cout << "nonlinearity detection skipped: " << e.what() << "\n";
  }
  if (nl) {
    const auto text = format_nonlinearity(*nl);
    harness::write_text(out_path(c, "nonlinearity.txt"), text);
    std::cout << text;
    if (c.assert_limits && nl->flag_frequency) return kThresholdBreach;
  }
  return kOk;
}

int identify(const std::string& config, const Common& c) {
  auto cfg = load(config);
  if (c.seed) cfg.frf.spec.seed = *c.seed;
  const auto ex = harness::run_frf_experiment(cfg);
  const auto id = harness::identify(ex.frf, cfg, cfg.frf.speed, &ex);
  const auto text = harness::format_identification(id);
  harness::write_text(out_path(c, "frf.csv"), harness::frf_to_csv(ex.frf));
  harness::write_text(out_path(c, "identification.txt"), text);
  std::cout << text;
  if (c.assert_limits) {
    double energy = 0.0;
    for (std::size_t k = 0; k < ex.frf.size(); ++k) {
      const bool weighted = cfg.sysid.weighting == sysid::Weighting::inverse_variance && ex.frf.variance[k] > 0.0;
      energy += (weighted ? 1.0 / ex.frf.variance[k] : 1.0) * std::norm(ex.frf.response[k]);
    }
    const double relative = id.fit.residual / energy;
    if (!id.fit.converged || !(relative < kFitLimit)) {
      std::cerr << fmt::format("identification check failed: converged={}, relative residual {:.4g} (< {})\n",
                               id.fit.converged, relative, kFitLimit);
      return kThresholdBreach;
    }
  }
  return kOk;
}

int analyze(const std::string& log_path, const Common& c) {
  const auto log = harness::import_csv(log_path);
  const auto report = harness::metrics(log);
  std::cout << harness::format_report(report);
  if (c.out_dir != ".") harness::export_report(report, out_path(c, "report.txt"));
  if (c.assert_limits && !harness::within_tracking_limits(report)) return kThresholdBreach;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yaw-rate MPC trajectory tracking and yaw-dynamics identification for small tractors"};
  app.require_subcommand(1);

  Common common;
  std::string config;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Override the noise / excitation seed");
    sub->add_option("--out-dir", common.out_dir, "Directory for exported files")->capture_default_str();
    sub->add_option("--format", common.format, "Export format")->check(CLI::IsMember({"csv"}))->capture_default_str();
    sub->add_flag("--assert", common.assert_limits, "Exit with status 4 when an acceptance threshold is breached");
  };

  auto* sim = app.add_subcommand("simulate", "Run the closed-loop figure-eight experiment and export log + report");
  sim->add_option("config", config, "INI configuration (defaults when omitted)")->check(CLI::ExistingFile);
  add_common(sim);
  auto* ident = app.add_subcommand("identify", "Multisine experiment, model fit, structure screen, tire extraction");
  ident->add_option("config", config, "INI configuration (defaults when omitted)")->check(CLI::ExistingFile);
  add_common(ident);
  auto* frf_cmd = app.add_subcommand("frf", "Multisine experiment and FRF export");
  frf_cmd->add_option("config", config, "INI configuration (defaults when omitted)")->check(CLI::ExistingFile);
  add_common(frf_cmd);
  std::string log_path;
  auto* an = app.add_subcommand("analyze", "Tracking metrics of an exported log");
  an->add_option("log", log_path, "Log CSV")->required()->check(CLI::ExistingFile);
  add_common(an);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*sim) return simulate(config, common);
    if (*ident) return identify(config, common);
    if (*frf_cmd) return frf(config, common);
    return analyze(log_path, common);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::config || e.kind() == ErrorKind::io ? kConfigError : kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
