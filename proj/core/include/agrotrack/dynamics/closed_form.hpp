#pragma once

#include <string>
#include <vector>

#include "agrotrack/dynamics/linear_models.hpp"

namespace agrotrack::dynamics {

/// Closed-form transfer-function coefficients of the RLF and RLFR models,
/// evaluated exactly as published. Three of the published lines do not agree
/// with the state-space derivation (see closed_form_cross_check); they are
/// evaluated verbatim here. Throws ErrorKind::domain for v_x <= 0 and for
/// variants other than RLF / RLFR.
RationalTF closed_form_coefficients(const VehicleParams& params, double v_x, YawModel variant);

struct CoefficientCheck {
  std::string name;      // e.g. "b2*" or "a1<>"
  double derived;        // from tf_from_ss(linearize_yaw(...))
  double published;      // closed form as printed
  double reconstructed;  // corrected closed form (equal to published when no typo)
  double rel_error;      // |published - derived| / |derived|
  double reconstructed_rel_error;
  bool known_typo;       // published line is known to be inconsistent
};

struct ClosedFormCheck {
  YawModel variant;
  std::vector<CoefficientCheck> coefficients;  // b_0.. then a_0..

  /// True when every line that is not a known typo matches to tol, and every
  /// reconstructed line matches to tol.
  bool consistent(double tol) const;
};

/// Coefficient-by-coefficient comparison of the symbolic state-space result
/// against the published formulas.
ClosedFormCheck closed_form_cross_check(const VehicleParams& params, double v_x, YawModel variant);

}  // namespace agrotrack::dynamics
