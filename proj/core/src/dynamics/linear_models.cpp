#include "agrotrack/dynamics/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "agrotrack/errors.hpp"
#include "agrotrack/polynomial.hpp"

namespace agrotrack::dynamics {

StateSpace::StateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d,
                       std::optional<double> sample_time)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)), dt(sample_time) {
  if (A.rows() != A.cols()) fail(ErrorKind::dimension, "StateSpace: A must be square");
  if (B.rows() != A.rows()) fail(ErrorKind::dimension, "StateSpace: B rows must match A");
  if (C.cols() != A.cols()) fail(ErrorKind::dimension, "StateSpace: C columns must match A");
  if (D.rows() != C.rows() || D.cols() != B.cols()) fail(ErrorKind::dimension, "StateSpace: D must be outputs x inputs");
  if (dt && !(*dt > 0.0)) fail(ErrorKind::domain, "StateSpace: sample time must be positive");
}

RationalTF::RationalTF(std::vector<double> num, std::vector<double> den) {
  den = trim_leading(std::move(den));
  num = trim_leading(std::move(num));
  if (den.empty() || den.front() == 0.0) fail(ErrorKind::domain, "RationalTF: zero denominator");
  if (num.empty()) num = {0.0};
  if (num.size() >= den.size()) fail(ErrorKind::domain, "RationalTF: transfer function must be strictly proper");
  const double lead = den.front();
  for (double& c : den) c /= lead;
  for (double& c : num) c /= lead;
  den.front() = 1.0;
  num_ = std::move(num);
  den_ = std::move(den);
}

std::complex<double> RationalTF::operator()(std::complex<double> s) const { return polyval(num_, s) / polyval(den_, s); }

double RationalTF::dc_gain() const {
  const double d0 = den_.back();
  if (d0 == 0.0) return std::numeric_limits<double>::infinity();
  return num_.back() / d0;
}

const char* to_string(YawModel model) {
  switch (model) {
    case YawModel::TB: return "TB";
    case YawModel::RLF: return "RLF";
    case YawModel::RLFR: return "RLFR";
    case YawModel::EMP2: return "EMP2";
  }
  return "?";
}

RationalTF empirical_second_order() { return RationalTF({291.0}, {1.0, 10.9, 242.0}); }

RationalTF identified_yaw_model(YawModel variant) {
  switch (variant) {
    case YawModel::RLF:
      return RationalTF({292.0, 177.0}, {1.0, 11.6, 249.0, 150.0});
    case YawModel::RLFR:
      return RationalTF({279.0, 335.0, 27860.0}, {1.0, 11.5, 347.0, 1311.0, 23340.0});
    case YawModel::EMP2:
      return empirical_second_order();
    case YawModel::TB:
      break;
  }
  fail(ErrorKind::domain, "identified_yaw_model: no identified model for the traditional bicycle structure");
}

StateSpace linearize_yaw(const VehicleParams& p, double v, YawModel variant) {
  if (variant == YawModel::EMP2) return ss_from_tf(empirical_second_order());
  if (!(v > 0.0)) fail(ErrorKind::domain, "linearize_yaw: v_x must be positive");

  const double m = p.mass(), I = p.inertia(), lf = p.l_f(), lr = p.l_r();
  const double cf = p.c_alpha_f(), cr = p.c_alpha_r(), sf = p.sigma_f(), sr = p.sigma_r();

  using Eigen::MatrixXd;
  switch (variant) {
    case YawModel::TB: {
      MatrixXd A(2, 2), B(2, 1), C(1, 2);
      A << -(cf + cr) / (m * v), -v - (cf * lf - cr * lr) / (m * v),
           -(lf * cf - lr * cr) / (I * v), -(lf * lf * cf + lr * lr * cr) / (I * v);
      B << cf / m, lf * cf / I;
      C << 0.0, 1.0;
      return {A, B, C, MatrixXd::Zero(1, 1)};
    }
    case YawModel::RLF: {
      // alpha_r stays algebraic: (v_y - l_r gamma) / v_x.
      MatrixXd A(3, 3), B(3, 1), C(1, 3);
      A << -cr / (m * v), -v + cr * lr / (m * v), -cf / m,
           lr * cr / (I * v), -lr * lr * cr / (I * v), -lf * cf / I,
           1.0 / sf, lf / sf, -v / sf;
      B << 0.0, 0.0, -v / sf;
      C << 0.0, 1.0, 0.0;
      return {A, B, C, MatrixXd::Zero(1, 1)};
    }
    case YawModel::RLFR: {
      MatrixXd A(4, 4), B(4, 1), C(1, 4);
      A << 0.0, -v, -cf / m, -cr / m,
           0.0, 0.0, -lf * cf / I, lr * cr / I,
           1.0 / sf, lf / sf, -v / sf, 0.0,
           1.0 / sr, -lr / sr, 0.0, -v / sr;
      B << 0.0, 0.0, -v / sf, 0.0;
      C << 0.0, 1.0, 0.0, 0.0;
      return {A, B, C, MatrixXd::Zero(1, 1)};
    }
    case YawModel::EMP2: break;
  }
  fail(ErrorKind::domain, "linearize_yaw: unknown variant");
}

RationalTF tf_from_ss(const StateSpace& ss) {
  if (ss.inputs() != 1 || ss.outputs() != 1) fail(ErrorKind::dimension, "tf_from_ss: system must be SISO");
  const Eigen::Index n = ss.states();
  if (ss.D(0, 0) != 0.0) fail(ErrorKind::domain, "tf_from_ss: feedthrough D must be zero for a strictly proper model");

  // Faddeev-LeVerrier: adj(sI - A) = sum_k M_k s^(n-1-k), det(sI - A) = sum_k c_k s^(n-k).
  std::vector<double> den(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> num(static_cast<std::size_t>(n), 0.0);
  den[0] = 1.0;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    num[static_cast<std::size_t>(k - 1)] = (ss.C * M * ss.B)(0, 0);
    const Eigen::MatrixXd AM = ss.A * M;
    const double c = -AM.trace() / static_cast<double>(k);
    den[static_cast<std::size_t>(k)] = c;
    M = AM + c * Eigen::MatrixXd::Identity(n, n);
  }
  // Leading numerator terms that are round-off relative to the rest are structural zeros.
  return RationalTF(trim_leading(std::move(num), 1e-12), std::move(den));
}

StateSpace ss_from_tf(const RationalTF& tf) {
  const auto& den = tf.den();
  const auto& num = tf.num();
  const Eigen::Index n = tf.order();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), B = Eigen::MatrixXd::Zero(n, 1), C = Eigen::MatrixXd::Zero(1, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  // Companion row: x_n' = -a_0 x_1 - ... - a_{n-1} x_n + u
  for (Eigen::Index j = 0; j < n; ++j) A(n - 1, j) = -den[static_cast<std::size_t>(n - j)];
  B(n - 1, 0) = 1.0;
  // y = b_0 x_1 + b_1 x_2 + ...
  const auto m = static_cast<Eigen::Index>(num.size());
  for (Eigen::Index j = 0; j < m; ++j) C(0, j) = num[static_cast<std::size_t>(m - 1 - j)];
  return {A, B, C, Eigen::MatrixXd::Zero(1, 1)};
}

double PoleZeroMap::max_pole_real() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : poles) best = std::max(best, p.real());
  return best;
}

PoleZeroMap pole_zero_analysis(const RationalTF& tf, double cancel_tol) {
  auto by_real_then_imag = [](const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  PoleZeroMap map;
  map.poles = polyroots(tf.den());
  map.zeros = polyroots(tf.num());
  std::sort(map.poles.begin(), map.poles.end(), by_real_then_imag);
  std::sort(map.zeros.begin(), map.zeros.end(), by_real_then_imag);
  for (const auto& p : map.poles)
    for (const auto& z : map.zeros)
      if (const double d = std::abs(p - z); d < cancel_tol) map.cancellations.push_back({p, z, d});
  return map;
}

}  // namespace agrotrack::dynamics
