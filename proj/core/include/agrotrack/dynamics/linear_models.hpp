#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "agrotrack/dynamics/vehicle.hpp"

namespace agrotrack::dynamics {

/// Linear model x' = Ax + Bu, y = Cx + Du. A continuous model has no sample time.
struct StateSpace {
  Eigen::MatrixXd A, B, C, D;
  std::optional<double> dt;  // nullopt: continuous time

  StateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d,
             std::optional<double> sample_time = std::nullopt);

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }
  bool is_discrete() const { return dt.has_value(); }
};

/// Strictly proper rational transfer function with a monic denominator.
/// Coefficients are in descending powers of s.
class RationalTF {
 public:
  /// Normalizes by the leading denominator coefficient. Throws ErrorKind::domain
  /// if the result is not strictly proper or the denominator is zero.
  RationalTF(std::vector<double> num, std::vector<double> den);

  const std::vector<double>& num() const { return num_; }
  const std::vector<double>& den() const { return den_; }
  int order() const { return static_cast<int>(den_.size()) - 1; }
  int num_degree() const { return static_cast<int>(num_.size()) - 1; }

  std::complex<double> operator()(std::complex<double> s) const;
  std::complex<double> freq_response(double omega) const { return (*this)({0.0, omega}); }
  double dc_gain() const;

 private:
  std::vector<double> num_, den_;
};

enum class YawModel {
  TB,    // traditional bicycle, states (v_y, gamma)
  RLF,   // relaxation length on the front tire, states (v_y, gamma, alpha_f)
  RLFR,  // relaxation length on both tires, states (v_y, gamma, alpha_f, alpha_r)
  EMP2,  // empirical 291 / (s^2 + 10.9 s + 242); params ignored
};

const char* to_string(YawModel model);

/// Linearized yaw dynamics from steering angle to yaw rate at constant v_x.
/// Throws ErrorKind::domain when v_x <= 0.
StateSpace linearize_yaw(const VehicleParams& params, double v_x, YawModel variant);

/// The identified second-order yaw model 291 / (s^2 + 10.9 s + 242).
RationalTF empirical_second_order();

/// Transfer functions identified on the small tractor at 1 m/s:
///   RLF   (292 s + 177) / (s^3 + 11.6 s^2 + 249 s + 150)
///   RLFR  (279 s^2 + 335 s + 27860) / (s^4 + 11.5 s^3 + 347 s^2 + 1311 s + 23340)
///   EMP2  empirical_second_order()
/// Throws ErrorKind::domain for TB, which was not identified.
RationalTF identified_yaw_model(YawModel variant);

/// Characteristic-polynomial (Faddeev-LeVerrier) conversion. Throws
/// ErrorKind::dimension for non-SISO systems.
RationalTF tf_from_ss(const StateSpace& ss);

/// Controllable canonical realization of a transfer function (continuous).
StateSpace ss_from_tf(const RationalTF& tf);

inline constexpr double kCancelTolerance = 1e-3;

struct PoleZeroCancellation {
  std::complex<double> pole;
  std::complex<double> zero;
  double distance;
};

struct PoleZeroMap {
  std::vector<std::complex<double>> poles;  // sorted by real, then imaginary part
  std::vector<std::complex<double>> zeros;
  std::vector<PoleZeroCancellation> cancellations;

  double max_pole_real() const;
};

PoleZeroMap pole_zero_analysis(const RationalTF& tf, double cancel_tol = kCancelTolerance);

}  // namespace agrotrack::dynamics
