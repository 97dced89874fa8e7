#include "agrotrack/sysid/validate.hpp"

#include <cmath>
#include <string>

#include "agrotrack/control/discretize.hpp"
#include "agrotrack/errors.hpp"

namespace agrotrack::sysid {

std::vector<double> simulate_tf(const dynamics::RationalTF& tf, const std::vector<double>& u, double fs) {
  if (!(fs > 0.0)) fail(ErrorKind::domain, "simulate_tf: sample rate must be positive");
  const double worst = dynamics::pole_zero_analysis(tf).max_pole_real();
  if (worst >= 0.0)
    fail(ErrorKind::simulation_unstable, "simulate_tf: model has a pole with real part " + std::to_string(worst));
  const auto d = control::discretize(dynamics::ss_from_tf(tf), 1.0 / fs);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d.states());
  std::vector<double> y;
  y.reserve(u.size());
  for (double uk : u) {
    y.push_back((d.C * x)(0, 0));
    x = d.A * x + d.B.col(0) * uk;
  }
  return y;
}

double validate_time_domain(const dynamics::RationalTF& tf, const std::vector<double>& u, const std::vector<double>& y,
                            double fs, std::size_t discard) {
  if (u.size() != y.size()) fail(ErrorKind::dimension, "validate_time_domain: input and output lengths differ");
  if (discard >= u.size()) fail(ErrorKind::domain, "validate_time_domain: nothing left after the transient discard");
  const std::vector<double> sim = simulate_tf(tf, u, fs);
  double ss = 0.0;
  for (std::size_t k = discard; k < u.size(); ++k) ss += (sim[k] - y[k]) * (sim[k] - y[k]);
  return std::sqrt(ss / static_cast<double>(u.size() - discard));
}

}  // namespace agrotrack::sysid
