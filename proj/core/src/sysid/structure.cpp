#include "agrotrack/sysid/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agrotrack/errors.hpp"

namespace agrotrack::sysid {

std::optional<ResonancePeak> find_resonance_peak(const signals::FrfMeasurement& frf) {
  const std::size_t K = frf.response.size();
  if (K < 3) return std::nullopt;
  std::vector<double> mag(K);
  for (std::size_t k = 0; k < K; ++k) mag[k] = std::abs(frf.response[k]);

  std::optional<ResonancePeak> best;
  for (std::size_t i = 1; i + 1 < K; ++i) {
    if (!(mag[i] > mag[i - 1] && mag[i] >= mag[i + 1])) continue;
    const double left = *std::min_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(i));
    const double right = *std::min_element(mag.begin() + static_cast<std::ptrdiff_t>(i + 1), mag.end());
    const double prominence = mag[i] - std::max(left, right);
    const double sigma = i < frf.variance.size() ? std::sqrt(std::max(frf.variance[i], 0.0)) : 0.0;
    if (prominence <= std::max(3.0 * sigma, 1e-3 * mag[i])) continue;
    if (!best || prominence > best->prominence) best = ResonancePeak{frf.freqs[i], mag[i], prominence};
  }
  return best;
}

StructureReport structure_screen(const signals::FrfMeasurement& frf, Weighting weighting) {
  static const std::pair<ModelOrder, const char*> candidates[] = {
      {{1, 2}, "TB"}, {{0, 2}, "EMP2"}, {{1, 3}, "RLF"}, {{2, 4}, "RLFR"}};

  StructureReport report;
  report.peak = find_resonance_peak(frf);

  // Residuals below this floor are numerically indistinguishable; parsimony decides.
  double energy = 0.0;
  for (std::size_t k = 0; k < frf.size(); ++k) {
    const double w = weighting == Weighting::inverse_variance && frf.variance[k] > 0.0 ? 1.0 / frf.variance[k] : 1.0;
    energy += w * std::norm(frf.response[k]);
  }
  const double floor = kResidualFloor * energy;

  for (const auto& [order, name] : candidates) {
    CandidateFit c{order, name, std::nullopt, {}, std::numeric_limits<double>::infinity(), false};
    FitConfig cfg;
    cfg.order = order;
    cfg.weighting = weighting;
    try {
      c.fit = fit_tf(frf, cfg);
      c.score = std::max(c.fit->residual, floor) * (1.0 + kParsimonyPenalty * order.n_params());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ill_posed) throw;
      c.failure = e.what();
    }
    c.rejected = report.peak.has_value() && order == ModelOrder{1, 2};
    report.ranking.push_back(std::move(c));
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [](const CandidateFit& a, const CandidateFit& b) {
    if (a.rejected != b.rejected) return !a.rejected;
    return a.score < b.score;
  });
  return report;
}

}  // namespace agrotrack::sysid
