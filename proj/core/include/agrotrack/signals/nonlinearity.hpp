#pragma once

#include <optional>
#include <vector>

#include "agrotrack/signals/frf.hpp"

namespace agrotrack::signals {

struct NonlinearityBand {
  double f_lo = 0.0;  // [Hz]
  double f_hi = 0.0;
  double excited_level = 0.0;  // mean output level at excited lines
  double even_level = 0.0;     // mean level at even detection lines (0 when none)
  double odd_level = 0.0;      // mean level at odd detection lines (0 when none)
  double even_ratio = 0.0;
  double odd_ratio = 0.0;
};

struct NonlinearityReport {
  std::vector<NonlinearityBand> bands;
  std::optional<double> flag_frequency;  // lower edge of the first band where a ratio exceeds 1
  double mean_even_ratio = 0.0;
  double mean_odd_ratio = 0.0;
};

/// Compares detection-line output levels with the excited-line level in
/// log-spaced bands over the excited range. Throws ErrorKind::grid_type when
/// the excited band contains no odd detection line.
NonlinearityReport nonlinearity_report(const FrfMeasurement& frf, int n_bands = 8);

}  // namespace agrotrack::signals
