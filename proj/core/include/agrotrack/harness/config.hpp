#pragma once

#include <map>
#include <string>
#include <string_view>

#include "agrotrack/harness/experiment.hpp"
#include "agrotrack/signals/multisine.hpp"
#include "agrotrack/sysid/fit.hpp"

namespace agrotrack::harness {

/// Excite-simulate-estimate settings.
struct FrfSettings {
  signals::MultisineSpec spec{};  // amplitude in radians of steering
  double speed = 1.0;             // constant forward speed during the experiment [m/s]
  PlantKind plant = PlantKind::linear;
  dynamics::YawModel model = dynamics::YawModel::EMP2;  // linear plant only
  double output_noise = 0.0;      // white noise std on the measured yaw rate [rad/s]
  bool discard_first_period = true;
  bool through_actuator = false;  // nonlinear plant: route the excitation through the position servo
};

struct SysidSettings {
  sysid::ModelOrder order{0, 2};
  sysid::Weighting weighting = sysid::Weighting::uniform;
  int max_iter = 200;
  double tol = 1e-12;
  bool screen_structures = true;
  bool extract_physical = true;  // runs a (2,4) fit and extracts tire parameters
};

struct RunConfig {
  ExperimentConfig experiment = ExperimentConfig::defaults();
  FrfSettings frf{};
  SysidSettings sysid{};
};

/// Vehicle from flat keys (mass, inertia, l_f, l_r, c_alpha_f, c_alpha_r,
/// sigma_f, sigma_r, tire_radius). Absent keys take the reference tractor
/// value, except inertia (m l_f l_r) and the relaxation lengths (1.5 tire radii).
dynamics::VehicleParams vehicle_from_keys(const std::map<std::string, double>& keys);

/// Parses an INI document. Unknown sections or keys, unparsable values and
/// invalid combinations throw ErrorKind::config.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace agrotrack::harness
