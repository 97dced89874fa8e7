#include "agrotrack/dynamics/vehicle.hpp"

#include <cmath>
#include <string>

#include "agrotrack/errors.hpp"

namespace agrotrack::dynamics {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    fail(ErrorKind::domain, std::string("vehicle parameter '") + name + "' must be positive and finite");
}

}  // namespace

VehicleParams::VehicleParams(const Init& in)
    : mass_(in.mass),
      inertia_(in.inertia),
      l_f_(in.l_f),
      l_r_(in.l_r),
      c_alpha_f_(in.c_alpha_f),
      c_alpha_r_(in.c_alpha_r),
      sigma_f_(in.sigma_f),
      sigma_r_(in.sigma_r) {
  require_positive(mass_, "mass");
  require_positive(inertia_, "inertia");
  require_positive(l_f_, "l_f");
  require_positive(l_r_, "l_r");
  require_positive(c_alpha_f_, "c_alpha_f");
  require_positive(c_alpha_r_, "c_alpha_r");
  require_positive(sigma_f_, "sigma_f");
  require_positive(sigma_r_, "sigma_r");
  if (in.wheelbase) {
    require_positive(*in.wheelbase, "wheelbase");
    if (std::abs(*in.wheelbase - (l_f_ + l_r_)) > 1e-9 * (l_f_ + l_r_))
      fail(ErrorKind::domain, "wheelbase must equal l_f + l_r");
  }
}

VehicleParams VehicleParams::reference_tractor() {
  return VehicleParams({.mass = 700.0,
                        .inertia = 280.0,
                        .l_f = 1.0,
                        .l_r = 0.4,
                        .wheelbase = 1.4,
                        .c_alpha_f = 8000.0,
                        .c_alpha_r = 90000.0,
                        .sigma_f = 0.1942,
                        .sigma_r = 1.6657});
}

VehicleParams VehicleParams::with_tires(double c_alpha_f, double c_alpha_r, double sigma_f, double sigma_r) const {
  return VehicleParams({.mass = mass_,
                        .inertia = inertia_,
                        .l_f = l_f_,
                        .l_r = l_r_,
                        .wheelbase = std::nullopt,
                        .c_alpha_f = c_alpha_f,
                        .c_alpha_r = c_alpha_r,
                        .sigma_f = sigma_f,
                        .sigma_r = sigma_r});
}

double inertia_from_geometry(double mass, double l_f, double l_r) {
  if (!(mass > 0.0) || !(l_f > 0.0) || !(l_r > 0.0))
    fail(ErrorKind::domain, "inertia_from_geometry: inputs must be positive");
  return mass * l_f * l_r;
}

double relaxation_length_from_radius(double tire_radius) {
  if (!(tire_radius > 0.0)) fail(ErrorKind::domain, "tire radius must be positive");
  return 1.5 * tire_radius;
}

std::pair<double, double> algebraic_slip_angles(const TractorState& s, const VehicleParams& p) {
  if (std::abs(s.v_x) < kSingularSpeed)
    fail(ErrorKind::singular_speed, "algebraic slip angles are singular at |v_x| < 0.05 m/s");
  const double alpha_f = (s.v_y + p.l_f() * s.gamma) / s.v_x - s.delta;
  const double alpha_r = (s.v_y - p.l_r() * s.gamma) / s.v_x;
  return {alpha_f, alpha_r};
}

}  // namespace agrotrack::dynamics
