#include "agrotrack/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "agrotrack/errors.hpp"

namespace agrotrack {

std::complex<double> polyval(std::span<const double> coeffs, std::complex<double> s) {
  std::complex<double> acc{0.0, 0.0};
  for (double c : coeffs) acc = acc * s + c;
  return acc;
}

double polyval(std::span<const double> coeffs, double s) {
  double acc = 0.0;
  for (double c : coeffs) acc = acc * s + c;
  return acc;
}

std::vector<std::complex<double>> polyroots(std::span<const double> coeffs) {
  auto first = std::find_if(coeffs.begin(), coeffs.end(), [](double c) { return c != 0.0; });
  std::vector<double> p(first, coeffs.end());
  std::vector<std::complex<double>> roots;
  // Trailing zeros are roots at the origin.
  while (p.size() > 1 && p.back() == 0.0) {
    roots.emplace_back(0.0, 0.0);
    p.pop_back();
  }
  const auto n = static_cast<Eigen::Index>(p.size()) - 1;
  if (n <= 0) return roots;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -p[static_cast<std::size_t>(j) + 1] / p[0];
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) fail(ErrorKind::numerical, "polyroots: eigenvalue iteration did not converge");
  for (Eigen::Index i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

std::vector<double> poly_from_roots(std::span<const std::complex<double>> roots) {
  std::vector<std::complex<double>> acc{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] -= acc[i] * r;
    }
    acc = std::move(next);
  }
  std::vector<double> out(acc.size());
  std::transform(acc.begin(), acc.end(), out.begin(), [](auto c) { return c.real(); });
  return out;
}

std::vector<double> polymul(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> trim_leading(std::vector<double> coeffs, double rel_tol) {
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  std::size_t k = 0;
  while (k + 1 < coeffs.size() && std::abs(coeffs[k]) <= rel_tol * scale) ++k;
  coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(k));
  return coeffs;
}

}  // namespace agrotrack
