#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agrotrack/dynamics/linear_models.hpp"
#include "agrotrack/harness/config.hpp"
#include "agrotrack/signals/frf.hpp"
#include "agrotrack/signals/multisine.hpp"
#include "agrotrack/sysid/fit.hpp"
#include "agrotrack/sysid/physical.hpp"
#include "agrotrack/sysid/structure.hpp"

namespace agrotrack::harness {

/// Steering-to-yaw-rate record of an open-loop multisine experiment.
struct FrfExperiment {
  signals::Multisine excitation;
  std::vector<double> t;
  std::vector<double> u;  // applied steering angle [rad]
  std::vector<double> y;  // measured yaw rate [rad/s]
  signals::FrfMeasurement frf;
};

/// Drives the configured plant at constant speed with the multisine on an ideal
/// steering actuator and estimates the frequency response. The plant sees the
/// continuous-time excitation; outputs are sampled at fs. Throws
/// ErrorKind::simulation_unstable when the yaw model has an unstable pole.
FrfExperiment run_frf_experiment(const RunConfig& cfg);

/// Same experiment on a linear plant given as a transfer function. Only the
/// excitation, noise and estimation settings of `frf` are used.
FrfExperiment run_frf_experiment(const dynamics::RationalTF& plant, const FrfSettings& frf);

struct Identification {
  sysid::FitResult fit;
  std::optional<sysid::StructureReport> structure;
  std::optional<sysid::Extraction> extraction;
  std::string extraction_failure;  // set when the extraction was requested but failed
  std::optional<double> validation_rms;  // time-domain yaw-rate RMS error when a record is given
};

/// Fits the configured order, optionally screens the candidate structures and
/// extracts tire parameters from a fourth-order fit, then replays the record
/// (when given) through the fitted model.
Identification identify(const signals::FrfMeasurement& frf, const RunConfig& cfg, double v_x,
                        const FrfExperiment* record = nullptr);

/// Human-readable summary followed by key=value lines.
std::string format_identification(const Identification& id);

}  // namespace agrotrack::harness
