#pragma once

#include <complex>
#include <string>
#include <vector>

#include "agrotrack/signals/multisine.hpp"

namespace agrotrack::signals {

/// Output level at a line that carries no excitation.
struct DetectionLine {
  int line = 0;
  double freq_hz = 0.0;
  double level = 0.0;  // mean |Y_p(k)| over the averaged periods
};

struct FrfMeasurement {
  std::vector<double> freqs;                        // [Hz], strictly increasing
  std::vector<std::complex<double>> response;
  std::vector<double> variance;                     // variance of the averaged estimate
  std::vector<double> output_level;                 // mean |Y_p(k)| at the excited lines
  std::vector<DetectionLine> nonexcited_even;
  std::vector<DetectionLine> nonexcited_odd;
  std::vector<std::string> warnings;

  std::size_t size() const { return freqs.size(); }
};

struct FrfOptions {
  bool discard_first_period = true;
  double input_floor = 1e-12;  // |U(k)| relative to the largest excited |U| below which a line is dropped
};

/// Per-period FFT (FFTW) division Y_p(k)/U_p(k) averaged over periods. The
/// variance is the sample variance across periods divided by their count.
/// Throws ErrorKind::shape when a record is not a whole number of periods or
/// fewer than two periods remain to average.
FrfMeasurement estimate_frf(const std::vector<double>& u, const std::vector<double>& y, const MultisineSpec& spec,
                            const std::vector<int>& excited_lines, const FrfOptions& options = {});

/// Frequency response sampled from a model: variance zero, no detection lines.
FrfMeasurement frf_from_samples(std::vector<double> freqs_hz, std::vector<std::complex<double>> response);

}  // namespace agrotrack::signals
