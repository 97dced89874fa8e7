#include "agrotrack/sysid/physical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "agrotrack/errors.hpp"
#include "agrotrack/sysid/levenberg_marquardt.hpp"

namespace agrotrack::sysid {
namespace {

// (b2, b1, b0, a3, a2, a1, a0) of a (2,4) model.
Eigen::VectorXd coefficient_vector(const dynamics::RationalTF& tf) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(7);
  const auto& num = tf.num();
  const auto& den = tf.den();
  for (std::size_t i = 0; i < num.size(); ++i) c(static_cast<Eigen::Index>(3 - num.size() + i)) = num[i];
  for (std::size_t i = 1; i < den.size(); ++i) c(static_cast<Eigen::Index>(2 + i)) = den[i];
  return c;
}

TireParams from_log(const Eigen::VectorXd& z) { return {std::exp(z(0)), std::exp(z(1)), std::exp(z(2)), std::exp(z(3))}; }

bool agree(const TireParams& a, const TireParams& b, double tol) {
  auto close = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y)); };
  return close(a.c_alpha_f, b.c_alpha_f) && close(a.c_alpha_r, b.c_alpha_r) && close(a.sigma_f, b.sigma_f) &&
         close(a.sigma_r, b.sigma_r);
}

}  // namespace

Extraction extract_physical_params(const dynamics::RationalTF& tf, const KnownVehicle& known, double v_x,
                                   const ExtractOptions& opt) {
  if (tf.order() != 4 || tf.num_degree() > 2)
    fail(ErrorKind::structure, "extract_physical_params: expected a (2,4) model, got (" +
                                   std::to_string(tf.num_degree()) + "," + std::to_string(tf.order()) + ")");
  if (!(v_x > 0.0)) fail(ErrorKind::domain, "extract_physical_params: v_x must be positive");
  if (opt.n_starts < 1) fail(ErrorKind::config, "extract_physical_params: need at least one start");

  const double inertia = known.inertia.value_or(dynamics::inertia_from_geometry(known.mass, known.l_f, known.l_r));
  const dynamics::VehicleParams base({.mass = known.mass, .inertia = inertia, .l_f = known.l_f, .l_r = known.l_r, .wheelbase = std::nullopt,
                                      .c_alpha_f = 1.0, .c_alpha_r = 1.0, .sigma_f = 1.0, .sigma_r = 1.0});

  const Eigen::VectorXd target = coefficient_vector(tf);
  const double floor = 1e-9 * target.cwiseAbs().maxCoeff();
  const Eigen::VectorXd scale = target.cwiseAbs().cwiseMax(floor);

  const ResidualFn residual = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const TireParams p = from_log(z);
    if (!std::isfinite(p.c_alpha_f) || !std::isfinite(p.c_alpha_r) || !std::isfinite(p.sigma_f) ||
        !std::isfinite(p.sigma_r) || p.c_alpha_f <= 0 || p.c_alpha_r <= 0 || p.sigma_f <= 0 || p.sigma_r <= 0)
      return Eigen::VectorXd::Constant(7, std::numeric_limits<double>::infinity());
    const auto model = dynamics::tf_from_ss(dynamics::linearize_yaw(
        base.with_tires(p.c_alpha_f, p.c_alpha_r, p.sigma_f, p.sigma_r), v_x, dynamics::YawModel::RLFR));
    return (coefficient_vector(model) - target).cwiseQuotient(scale);
  };
  const JacobianFn jac = [&](const Eigen::VectorXd& z) { return numeric_jacobian(residual, z, 1e-7); };

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> decade(-std::log(10.0), std::log(10.0));
  const Eigen::Vector4d center(std::log(opt.guess.c_alpha_f), std::log(opt.guess.c_alpha_r), std::log(opt.guess.sigma_f),
                               std::log(opt.guess.sigma_r));

  Extraction out{base, {}};
  LmOptions lm;
  lm.max_iter = 300;
  lm.step_tol = 1e-13;
  int best = -1;
  for (int i = 0; i < opt.n_starts; ++i) {
    Eigen::VectorXd z0(4);
    for (int j = 0; j < 4; ++j) z0(j) = center(j) + decade(rng);
    StartOutcome so;
    so.start = from_log(z0);
    try {
      const LmResult r = levenberg_marquardt(residual, jac, z0, lm);
      so.solution = from_log(r.x);
      so.cost = r.cost;
      so.converged = r.converged && std::isfinite(r.cost);
    } catch (const Error&) {
      so.solution = so.start;
      so.cost = std::numeric_limits<double>::infinity();
    }
    out.report.starts.push_back(so);
    if (so.converged && (best < 0 || so.cost < out.report.starts[static_cast<std::size_t>(best)].cost)) best = i;
  }
  if (best < 0) fail(ErrorKind::extraction_failed, "extract_physical_params: no start converged");

  const StartOutcome& winner = out.report.starts[static_cast<std::size_t>(best)];
  const double cost_limit = std::max(opt.cost_ratio * winner.cost, 1e-20);
  for (const auto& s : out.report.starts) {
    if (!s.converged || s.cost > cost_limit) continue;
    if (agree(s.solution, winner.solution, opt.agreement))
      ++out.report.agreeing_starts;
    else
      out.report.ambiguous = true;
  }
  out.report.realistic = out.report.agreeing_starts >= 2;
  out.params = base.with_tires(winner.solution.c_alpha_f, winner.solution.c_alpha_r, winner.solution.sigma_f,
                               winner.solution.sigma_r);
  return out;
}

}  // namespace agrotrack::sysid
