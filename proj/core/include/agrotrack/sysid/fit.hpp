#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "agrotrack/dynamics/linear_models.hpp"
#include "agrotrack/signals/frf.hpp"

namespace agrotrack::sysid {

enum class Weighting { uniform, inverse_variance };
enum class FitInit { levy, given };

struct ModelOrder {
  int n_num = 0;
  int n_den = 2;
  int n_params() const { return n_num + 1 + n_den; }
  friend bool operator==(const ModelOrder&, const ModelOrder&) = default;
};

struct FitConfig {
  ModelOrder order{};
  Weighting weighting = Weighting::uniform;
  int max_iter = 200;
  double tol = 1e-12;
  FitInit init = FitInit::levy;
  std::optional<dynamics::RationalTF> initial;  // required when init == given

  /// Throws ErrorKind::config on an invalid combination.
  void validate() const;
};

struct FitResult {
  dynamics::RationalTF tf;
  double residual = 0.0;  // sum_k w_k |G(j w_k) - G_meas(w_k)|^2
  int iterations = 0;
  bool converged = false;
  Eigen::MatrixXd cov;    // (num b_m..b_0, den a_{n-1}..a_0), unscaled coefficients
  std::vector<double> cost_history;
  double min_singular_value = 0.0;  // of the scaled Jacobian, relative to the largest
};

/// Levy linearized least squares: minimizes |B(jw) - G A(jw)|^2 with A monic.
dynamics::RationalTF levy_fit(const signals::FrfMeasurement& frf, ModelOrder order,
                              Weighting weighting = Weighting::uniform);

/// Nonlinear least-squares fit of a strictly proper rational model with a monic
/// denominator. Frequencies are scaled by their geometric mean internally.
/// Throws ErrorKind::ill_posed when the Jacobian is rank deficient and
/// ErrorKind::domain when there are too few lines.
FitResult fit_tf(const signals::FrfMeasurement& frf, const FitConfig& cfg);

}  // namespace agrotrack::sysid
