#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "agrotrack/dynamics/linear_models.hpp"
#include "agrotrack/dynamics/vehicle.hpp"

namespace agrotrack::sysid {

/// Quantities assumed known before the tire parameters are extracted.
struct KnownVehicle {
  double mass = 0.0;
  double l_f = 0.0;
  double l_r = 0.0;
  std::optional<double> inertia;  // m l_f l_r when absent
};

struct TireParams {
  double c_alpha_f = 0.0;
  double c_alpha_r = 0.0;
  double sigma_f = 0.0;
  double sigma_r = 0.0;
};

struct ExtractOptions {
  int n_starts = 8;
  std::uint64_t seed = 7;
  TireParams guess{3e4, 3e4, 0.6, 0.6};  // starts are drawn log-uniformly within one decade of this
  double agreement = 0.05;               // relative tolerance for two starts to count as the same solution
  double cost_ratio = 10.0;              // starts within this factor of the best cost compete for it
};

struct StartOutcome {
  TireParams start;
  TireParams solution;
  double cost = 0.0;  // squared relative coefficient mismatch
  bool converged = false;
};

struct PlausibilityReport {
  std::vector<StartOutcome> starts;
  int agreeing_starts = 0;  // converged starts within `agreement` of the best, best included
  bool realistic = false;   // at least two independent starts agree
  bool ambiguous = false;   // another equally good start lands somewhere else
};

struct Extraction {
  dynamics::VehicleParams params;
  PlausibilityReport report;
};

/// Solves for (C_af, C_ar, sigma_f, sigma_r) so that the relaxation-length
/// model on both axles reproduces tf at speed v_x. Throws ErrorKind::structure
/// unless tf is fourth order with a numerator of degree at most two, and
/// ErrorKind::extraction_failed when no start converges.
Extraction extract_physical_params(const dynamics::RationalTF& tf, const KnownVehicle& known, double v_x,
                                   const ExtractOptions& options = {});

}  // namespace agrotrack::sysid
