#pragma once

#include <optional>
#include <utility>

namespace agrotrack::dynamics {

/// Physical constants of the tractor. The wheelbase always equals l_f + l_r.
class VehicleParams {
 public:
  struct Init {
    double mass = 0.0;         // [kg]
    double inertia = 0.0;      // yaw inertia [kg m^2]
    double l_f = 0.0;          // front axle to CG [m]
    double l_r = 0.0;          // rear axle to CG [m]
    std::optional<double> wheelbase;  // checked against l_f + l_r when given
    double c_alpha_f = 0.0;    // [N/rad]
    double c_alpha_r = 0.0;    // [N/rad]
    double sigma_f = 0.0;      // relaxation length [m]
    double sigma_r = 0.0;      // relaxation length [m]
  };

  /// Throws ErrorKind::domain when a field is not strictly positive or the
  /// wheelbase disagrees with l_f + l_r.
  explicit VehicleParams(const Init& init);

  /// Values of the identified small tractor (m = 700 kg, l_f = 1 m, l_r = 0.4 m,
  /// C_af = 8000, C_ar = 90000, sigma_f = 0.1942, sigma_r = 1.6657).
  static VehicleParams reference_tractor();

  double mass() const { return mass_; }
  double inertia() const { return inertia_; }
  double l_f() const { return l_f_; }
  double l_r() const { return l_r_; }
  double wheelbase() const { return l_f_ + l_r_; }
  double c_alpha_f() const { return c_alpha_f_; }
  double c_alpha_r() const { return c_alpha_r_; }
  double sigma_f() const { return sigma_f_; }
  double sigma_r() const { return sigma_r_; }

  /// Copy with the four tire quantities replaced.
  VehicleParams with_tires(double c_alpha_f, double c_alpha_r, double sigma_f, double sigma_r) const;

  friend bool operator==(const VehicleParams&, const VehicleParams&) = default;

 private:
  double mass_, inertia_, l_f_, l_r_, c_alpha_f_, c_alpha_r_, sigma_f_, sigma_r_;
};

/// Full planar state of the simulated tractor. Position is the CG.
struct TractorState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double v_x = 0.0;
  double v_y = 0.0;
  double gamma = 0.0;
  double alpha_f = 0.0;
  double alpha_r = 0.0;
  double delta = 0.0;       // actual front steering angle
  double delta_rate = 0.0;  // steering rate; only evolves for the valve-driven actuator

  friend bool operator==(const TractorState&, const TractorState&) = default;
};

/// I = m l_f l_r. Throws ErrorKind::domain for non-positive input.
double inertia_from_geometry(double mass, double l_f, double l_r);

/// Relaxation length rule for agricultural tires: 1.5 times the tire radius.
double relaxation_length_from_radius(double tire_radius);

inline constexpr double kSingularSpeed = 0.05;  // [m/s]

/// Steady-state slip angles (alpha_f, alpha_r). Throws ErrorKind::singular_speed
/// when |v_x| < kSingularSpeed.
std::pair<double, double> algebraic_slip_angles(const TractorState& state, const VehicleParams& params);

}  // namespace agrotrack::dynamics
