#pragma once

#include <cstdint>
#include <vector>

namespace agrotrack::signals {

enum class MultisineGrid {
  full,            // every harmonic in the band
  odd,             // odd harmonics only
  odd_odd_random,  // odd harmonics, one of each consecutive pair left out at random
};

struct MultisineSpec {
  double f0 = 0.02;     // frequency resolution [Hz]
  double f_min = 0.02;  // [Hz]
  double f_max = 2.0;   // [Hz]
  double fs = 20.0;     // [Hz]
  int n_periods = 4;
  double amplitude = 0.05;  // RMS of the signal
  MultisineGrid grid = MultisineGrid::odd_odd_random;
  std::uint64_t seed = 1;

  /// Throws ErrorKind::domain when the band, rates or period count are invalid.
  void validate() const;
  /// Samples per period, fs / f0.
  int period_samples() const;
};

struct Multisine {
  std::vector<double> signal;           // n_periods * period_samples samples
  std::vector<int> excited_lines;       // harmonic indices k (frequency k f0), ascending
  std::vector<int> detection_lines;     // in-band lines left out on purpose, ascending
  std::vector<double> phases;           // per excited line [rad]
  double line_amplitude = 0.0;          // common cosine amplitude after RMS scaling
  double f0 = 0.0;                      // [Hz]

  /// Continuous-time value of the periodic signal; matches `signal` at t = n / fs.
  double value(double t) const;
};

/// Sum of equal-amplitude cosines with seeded uniform phases, scaled to the
/// requested RMS. Throws ErrorKind::empty_grid when no line qualifies.
Multisine generate_multisine(const MultisineSpec& spec);

}  // namespace agrotrack::signals
