#include "agrotrack/sysid/fit.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "agrotrack/errors.hpp"
#include "agrotrack/sysid/levenberg_marquardt.hpp"

namespace agrotrack::sysid {
namespace {

using cd = std::complex<double>;

constexpr double kRankTolerance = 1e-13;

// Normalized frequency problem shared by Levy and the NLS fit.
struct ScaledData {
  std::vector<cd> s;       // j w_k / w_scale
  std::vector<cd> g;       // measured response
  std::vector<double> sw;  // sqrt of the weights
  double w_scale = 1.0;
};

ScaledData prepare(const signals::FrfMeasurement& frf, ModelOrder order, Weighting weighting) {
  const std::size_t K = frf.freqs.size();
  if (frf.response.size() != K || frf.variance.size() != K) fail(ErrorKind::dimension, "fit: FRF arrays differ in length");
  if (static_cast<int>(K) < order.n_params()) {
    fail(ErrorKind::domain, "fit: " + std::to_string(K) + " lines cannot determine " +
                                std::to_string(order.n_params()) + " parameters");
  }
  ScaledData d;
  double log_sum = 0.0;
  for (double f : frf.freqs) {
    if (!(f > 0.0)) fail(ErrorKind::domain, "fit: frequencies must be positive");
    log_sum += std::log(2.0 * std::numbers::pi * f);
  }
  d.w_scale = std::exp(log_sum / static_cast<double>(K));
  for (std::size_t k = 0; k < K; ++k) {
    d.s.emplace_back(0.0, 2.0 * std::numbers::pi * frf.freqs[k] / d.w_scale);
    d.g.push_back(frf.response[k]);
    if (weighting == Weighting::inverse_variance) {
      if (!(frf.variance[k] > 0.0)) fail(ErrorKind::domain, "fit: inverse-variance weighting needs positive variances");
      d.sw.push_back(1.0 / std::sqrt(frf.variance[k]));
    } else {
      d.sw.push_back(1.0);
    }
  }
  return d;
}

// theta = (b_0..b_m, a_0..a_{n-1}) in ascending powers of the scaled variable.
cd eval_poly_ascending(const double* c, int count, cd s) {
  cd acc = 0.0;
  for (int i = count - 1; i >= 0; --i) acc = acc * s + c[i];
  return acc;
}

cd den_at(const Eigen::VectorXd& theta, ModelOrder o, cd s) {
  cd acc = 1.0;
  for (int i = o.n_den - 1; i >= 0; --i) acc = acc * s + theta(o.n_num + 1 + i);
  return acc;
}

Eigen::VectorXd residuals(const ScaledData& d, ModelOrder o, const Eigen::VectorXd& theta) {
  const auto K = static_cast<Eigen::Index>(d.s.size());
  Eigen::VectorXd r(2 * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const cd s = d.s[static_cast<std::size_t>(k)];
    const cd e = (eval_poly_ascending(theta.data(), o.n_num + 1, s) / den_at(theta, o, s) - d.g[static_cast<std::size_t>(k)]) *
                 d.sw[static_cast<std::size_t>(k)];
    r(2 * k) = e.real();
    r(2 * k + 1) = e.imag();
  }
  return r;
}

Eigen::MatrixXd jacobian(const ScaledData& d, ModelOrder o, const Eigen::VectorXd& theta) {
  const auto K = static_cast<Eigen::Index>(d.s.size());
  Eigen::MatrixXd J(2 * K, o.n_params());
  for (Eigen::Index k = 0; k < K; ++k) {
    const cd s = d.s[static_cast<std::size_t>(k)];
    const double w = d.sw[static_cast<std::size_t>(k)];
    const cd A = den_at(theta, o, s);
    const cd G = eval_poly_ascending(theta.data(), o.n_num + 1, s) / A;
    cd sp = 1.0;
    for (int j = 0; j <= o.n_num; ++j, sp *= s) {
      const cd v = w * sp / A;
      J(2 * k, j) = v.real();
      J(2 * k + 1, j) = v.imag();
    }
    sp = 1.0;
    for (int i = 0; i < o.n_den; ++i, sp *= s) {
      const cd v = -w * G * sp / A;
      J(2 * k, o.n_num + 1 + i) = v.real();
      J(2 * k + 1, o.n_num + 1 + i) = v.imag();
    }
  }
  return J;
}

// Scaled coefficient c~_i = c_i w_scale^(i - n) for both polynomials.
Eigen::VectorXd to_scaled(const dynamics::RationalTF& tf, ModelOrder o, double w_scale) {
  if (tf.order() != o.n_den || tf.num_degree() > o.n_num)
    fail(ErrorKind::structure, "fit: initial model does not have the requested order");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(o.n_params());
  const auto& num = tf.num();
  const auto& den = tf.den();
  const int nd = static_cast<int>(num.size()) - 1;
  for (int p = 0; p <= nd; ++p)
    theta(p) = num[static_cast<std::size_t>(nd - p)] * std::pow(w_scale, p - o.n_den);
  for (int i = 0; i < o.n_den; ++i)
    theta(o.n_num + 1 + i) = den[static_cast<std::size_t>(o.n_den - i)] * std::pow(w_scale, i - o.n_den);
  return theta;
}

// Diagonal map from scaled theta to unscaled descending coefficients
// (b_m..b_0, a_{n-1}..a_0).
Eigen::VectorXd unscale_factors(ModelOrder o, double w_scale, Eigen::VectorXi& index) {
  Eigen::VectorXd f(o.n_params());
  index.resize(o.n_params());
  int out = 0;
  for (int p = o.n_num; p >= 0; --p, ++out) {
    f(out) = std::pow(w_scale, o.n_den - p);
    index(out) = p;
  }
  for (int i = o.n_den - 1; i >= 0; --i, ++out) {
    f(out) = std::pow(w_scale, o.n_den - i);
    index(out) = o.n_num + 1 + i;
  }
  return f;
}

dynamics::RationalTF from_scaled(const Eigen::VectorXd& theta, ModelOrder o, double w_scale) {
  std::vector<double> num, den{1.0};
  for (int p = o.n_num; p >= 0; --p) num.push_back(theta(p) * std::pow(w_scale, o.n_den - p));
  for (int i = o.n_den - 1; i >= 0; --i) den.push_back(theta(o.n_num + 1 + i) * std::pow(w_scale, o.n_den - i));
  return {num, den};
}

Eigen::VectorXd levy_scaled(const ScaledData& d, ModelOrder o) {
  const auto K = static_cast<Eigen::Index>(d.s.size());
  Eigen::MatrixXd M(2 * K, o.n_params());
  Eigen::VectorXd rhs(2 * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const cd s = d.s[static_cast<std::size_t>(k)];
    const cd g = d.g[static_cast<std::size_t>(k)];
    const double w = d.sw[static_cast<std::size_t>(k)];
    cd sp = 1.0;
    for (int j = 0; j <= o.n_num; ++j, sp *= s) {
      M(2 * k, j) = w * sp.real();
      M(2 * k + 1, j) = w * sp.imag();
    }
    sp = 1.0;
    for (int i = 0; i < o.n_den; ++i, sp *= s) {
      const cd v = -g * sp;
      M(2 * k, o.n_num + 1 + i) = w * v.real();
      M(2 * k + 1, o.n_num + 1 + i) = w * v.imag();
    }
    const cd t = g * sp * w;  // sp == s^n here
    rhs(2 * k) = t.real();
    rhs(2 * k + 1) = t.imag();
  }
  return M.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace

void FitConfig::validate() const {
  if (order.n_num < 0 || order.n_den < 1 || order.n_num >= order.n_den)
    fail(ErrorKind::config, "fit: require 0 <= n_num < n_den");
  if (max_iter < 1 || !(tol > 0.0)) fail(ErrorKind::config, "fit: require max_iter >= 1 and tol > 0");
  if (init == FitInit::given && !initial) fail(ErrorKind::config, "fit: init 'given' without an initial model");
}

dynamics::RationalTF levy_fit(const signals::FrfMeasurement& frf, ModelOrder order, Weighting weighting) {
  const ScaledData d = prepare(frf, order, weighting);
  return from_scaled(levy_scaled(d, order), order, d.w_scale);
}

FitResult fit_tf(const signals::FrfMeasurement& frf, const FitConfig& cfg) {
  cfg.validate();
  const ModelOrder o = cfg.order;
  const ScaledData d = prepare(frf, o, cfg.weighting);

  Eigen::VectorXd theta0 = cfg.init == FitInit::given ? to_scaled(*cfg.initial, o, d.w_scale) : levy_scaled(d, o);

  LmOptions lm;
  lm.max_iter = cfg.max_iter;
  lm.step_tol = cfg.tol;
  const LmResult res = levenberg_marquardt([&](const Eigen::VectorXd& t) { return residuals(d, o, t); },
                                           [&](const Eigen::VectorXd& t) { return jacobian(d, o, t); }, theta0, lm);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(res.jacobian, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double s_max = sv(0);
  const double s_min = sv(sv.size() - 1);
  if (!(s_max > 0.0) || s_min <= kRankTolerance * s_max) {
    fail(ErrorKind::ill_posed, "fit_tf: rank-deficient Jacobian, smallest singular value " + std::to_string(s_min) +
                                   " (largest " + std::to_string(s_max) + ")");
  }

  FitResult out{from_scaled(res.x, o, d.w_scale), res.cost, res.iterations, res.converged, {}, res.cost_history,
                s_min / s_max};

  const auto dof = static_cast<double>(res.jacobian.rows() - res.jacobian.cols());
  const double sigma2 = dof > 0 ? res.cost / dof : 0.0;
  const Eigen::MatrixXd cov_scaled =
      sigma2 * svd.matrixV() * sv.cwiseInverse().cwiseAbs2().asDiagonal() * svd.matrixV().transpose();
  Eigen::VectorXi index;
  const Eigen::VectorXd f = unscale_factors(o, d.w_scale, index);
  out.cov.resize(o.n_params(), o.n_params());
  for (int i = 0; i < o.n_params(); ++i)
    for (int j = 0; j < o.n_params(); ++j) out.cov(i, j) = f(i) * f(j) * cov_scaled(index(i), index(j));
  return out;
}

}  // namespace agrotrack::sysid
