#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "agrotrack/dynamics/linear_models.hpp"

namespace agrotrack::testing {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// C (sI - A)^-1 B + D evaluated directly, independent of any polynomial conversion.
inline std::complex<double> ss_response(const dynamics::StateSpace& ss, std::complex<double> s) {
  const Eigen::Index n = ss.states();
  const Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - ss.A.cast<std::complex<double>>();
  const Eigen::VectorXcd x = M.fullPivLu().solve(ss.B.col(0).cast<std::complex<double>>());
  return (ss.C.cast<std::complex<double>>() * x)(0, 0) + ss.D(0, 0);
}

// Horner evaluation of a descending-power polynomial.
inline std::complex<double> horner(const std::vector<double>& c, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (double v : c) acc = acc * s + v;
  return acc;
}

}  // namespace agrotrack::testing
