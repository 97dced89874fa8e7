#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agrotrack/sysid/fit.hpp"

namespace agrotrack::sysid {

inline constexpr double kParsimonyPenalty = 0.05;
inline constexpr double kResidualFloor = 1e-10;  // relative to the weighted data energy

struct CandidateFit {
  ModelOrder order;
  std::string name;             // TB, EMP2, RLF, RLFR
  std::optional<FitResult> fit;  // empty when the fit was ill-posed
  std::string failure;
  double score = 0.0;           // max(residual, floor) * (1 + penalty * n_params); +inf when failed
  bool rejected = false;        // structurally incompatible with the measured response
};

struct ResonancePeak {
  double freq_hz = 0.0;
  double magnitude = 0.0;
  double prominence = 0.0;
};

struct StructureReport {
  std::vector<CandidateFit> ranking;  // admissible candidates by ascending score, rejected ones last
  std::optional<ResonancePeak> peak;
};

/// Interior local maximum of |G| whose prominence exceeds both three standard
/// deviations of the line and 1e-3 of its magnitude.
std::optional<ResonancePeak> find_resonance_peak(const signals::FrfMeasurement& frf);

/// Fits (1,2), (0,2), (1,3) and (2,4) and ranks them with a parsimony penalty.
/// A resonance peak rejects the (1,2) structure. A candidate whose fit is
/// ill-posed is kept in the report, unranked, with the reason.
StructureReport structure_screen(const signals::FrfMeasurement& frf, Weighting weighting = Weighting::uniform);

}  // namespace agrotrack::sysid
