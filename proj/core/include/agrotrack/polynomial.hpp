#pragma once

#include <complex>
#include <span>
#include <vector>

namespace agrotrack {

// Polynomials are stored as coefficient lists in descending powers of s,
// i.e. {c_n, ..., c_1, c_0}.

std::complex<double> polyval(std::span<const double> coeffs, std::complex<double> s);
double polyval(std::span<const double> coeffs, double s);

/// Roots via the eigenvalues of the companion matrix. Leading zeros are ignored.
/// Throws ErrorKind::numerical when the eigen solver does not converge.
std::vector<std::complex<double>> polyroots(std::span<const double> coeffs);

/// Real polynomial with the given roots (complex roots must come in conjugate pairs).
std::vector<double> poly_from_roots(std::span<const std::complex<double>> roots);

std::vector<double> polymul(std::span<const double> a, std::span<const double> b);

/// Drops leading coefficients whose magnitude is at most rel_tol times the largest one.
std::vector<double> trim_leading(std::vector<double> coeffs, double rel_tol = 0.0);

}  // namespace agrotrack
