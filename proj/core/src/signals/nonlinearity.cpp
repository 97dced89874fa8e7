#include "agrotrack/signals/nonlinearity.hpp"

#include <cmath>

#include "agrotrack/errors.hpp"

namespace agrotrack::signals {
namespace {

double mean_level(const std::vector<DetectionLine>& lines, double lo, double hi, bool last) {
  double sum = 0.0;
  int n = 0;
  for (const auto& d : lines)
    if (d.freq_hz >= lo && (d.freq_hz < hi || (last && d.freq_hz <= hi))) {
      sum += d.level;
      ++n;
    }
  return n ? sum / n : 0.0;
}

}  // namespace

NonlinearityReport nonlinearity_report(const FrfMeasurement& frf, int n_bands) {
  if (frf.freqs.empty()) fail(ErrorKind::grid_type, "nonlinearity_report: no excited lines");
  if (n_bands < 1) fail(ErrorKind::domain, "nonlinearity_report: need at least one band");
  const double f_lo = frf.freqs.front();
  const double f_hi = frf.freqs.back();

  bool odd_in_band = false;
  for (const auto& d : frf.nonexcited_odd) odd_in_band |= (d.freq_hz >= f_lo && d.freq_hz <= f_hi);
  if (!odd_in_band) fail(ErrorKind::grid_type, "nonlinearity_report: no odd detection lines inside the excited band");

  NonlinearityReport report;
  const double log_lo = std::log(f_lo), log_hi = std::log(f_hi);
  int used = 0;
  for (int b = 0; b < n_bands; ++b) {
    const bool last = b == n_bands - 1;
    NonlinearityBand band;
    band.f_lo = std::exp(log_lo + (log_hi - log_lo) * b / n_bands);
    band.f_hi = last ? f_hi : std::exp(log_lo + (log_hi - log_lo) * (b + 1) / n_bands);
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < frf.freqs.size(); ++i)
      if (frf.freqs[i] >= band.f_lo && (frf.freqs[i] < band.f_hi || (last && frf.freqs[i] <= band.f_hi))) {
        sum += frf.output_level[i];
        ++n;
      }
    if (n == 0 || sum <= 0.0) continue;
    band.excited_level = sum / n;
    band.even_level = mean_level(frf.nonexcited_even, band.f_lo, band.f_hi, last);
    band.odd_level = mean_level(frf.nonexcited_odd, band.f_lo, band.f_hi, last);
    band.even_ratio = band.even_level / band.excited_level;
    band.odd_ratio = band.odd_level / band.excited_level;
    if (!report.flag_frequency && (band.even_ratio > 1.0 || band.odd_ratio > 1.0)) report.flag_frequency = band.f_lo;
    report.mean_even_ratio += band.even_ratio;
    report.mean_odd_ratio += band.odd_ratio;
    ++used;
    report.bands.push_back(band);
  }
  if (used > 0) {
    report.mean_even_ratio /= used;
    report.mean_odd_ratio /= used;
  }
  return report;
}

}  // namespace agrotrack::signals
