#include "agrotrack/signals/multisine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "agrotrack/errors.hpp"

namespace agrotrack::signals {
namespace {

bool near_integer(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

}  // namespace

void MultisineSpec::validate() const {
  if (!(f0 > 0.0) || !(fs > 0.0)) fail(ErrorKind::domain, "multisine: f0 and fs must be positive");
  if (!(0.0 < f_min && f_min < f_max && f_max < fs / 2.0))
    fail(ErrorKind::domain, "multisine: require 0 < f_min < f_max < fs/2");
  if (!near_integer(f_min / f0) || !near_integer(f_max / f0))
    fail(ErrorKind::domain, "multisine: band edges must be multiples of f0");
  if (!near_integer(fs / f0)) fail(ErrorKind::domain, "multisine: fs must be a multiple of f0");
  if (n_periods < 2) fail(ErrorKind::domain, "multisine: at least two periods are required");
  if (!(amplitude > 0.0)) fail(ErrorKind::domain, "multisine: amplitude must be positive");
}

int MultisineSpec::period_samples() const { return static_cast<int>(std::lround(fs / f0)); }

double Multisine::value(double t) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < excited_lines.size(); ++i)
    acc += std::cos(2.0 * std::numbers::pi * excited_lines[i] * f0 * t + phases[i]);
  return line_amplitude * acc;
}

Multisine generate_multisine(const MultisineSpec& spec) {
  spec.validate();
  const int N = spec.period_samples();
  const int k_lo = static_cast<int>(std::lround(spec.f_min / spec.f0));
  const int k_hi = static_cast<int>(std::lround(spec.f_max / spec.f0));

  std::mt19937_64 rng(spec.seed);
  Multisine out;
  switch (spec.grid) {
    case MultisineGrid::full:
      for (int k = k_lo; k <= k_hi; ++k) out.excited_lines.push_back(k);
      break;
    case MultisineGrid::odd:
      for (int k = k_lo; k <= k_hi; ++k)
        if (k % 2 == 1) out.excited_lines.push_back(k);
      break;
    case MultisineGrid::odd_odd_random: {
      std::vector<int> odd;
      for (int k = k_lo; k <= k_hi; ++k)
        if (k % 2 == 1) odd.push_back(k);
      std::bernoulli_distribution coin(0.5);
      std::size_t i = 0;
      for (; i + 1 < odd.size(); i += 2) {
        const bool drop_first = coin(rng);
        out.detection_lines.push_back(drop_first ? odd[i] : odd[i + 1]);
        out.excited_lines.push_back(drop_first ? odd[i + 1] : odd[i]);
      }
      if (i < odd.size()) out.excited_lines.push_back(odd[i]);
      break;
    }
  }
  if (out.excited_lines.empty()) fail(ErrorKind::empty_grid, "multisine: no eligible line in the band");

  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  auto& phases = out.phases;
  phases.reserve(out.excited_lines.size());
  for (std::size_t i = 0; i < out.excited_lines.size(); ++i) phases.push_back(phase_dist(rng));
  out.f0 = spec.f0;

  std::vector<double> period(static_cast<std::size_t>(N), 0.0);
  for (int n = 0; n < N; ++n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < out.excited_lines.size(); ++i)
      acc += std::cos(2.0 * std::numbers::pi * out.excited_lines[i] * n / N + phases[i]);
    period[static_cast<std::size_t>(n)] = acc;
  }
  double power = 0.0;
  for (double v : period) power += v * v;
  const double scale = spec.amplitude / std::sqrt(power / N);
  out.line_amplitude = scale;

  out.signal.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(spec.n_periods));
  for (int p = 0; p < spec.n_periods; ++p)
    for (double v : period) out.signal.push_back(scale * v);
  return out;
}

}  // namespace agrotrack::signals
