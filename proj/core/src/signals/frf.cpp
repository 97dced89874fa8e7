#include "agrotrack/signals/frf.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "agrotrack/errors.hpp"

namespace agrotrack::signals {
namespace {

// FFTW's planner is not re-entrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(static_cast<std::size_t>(n));
    out_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  // Spectrum of x[offset .. offset + n).
  void run(const std::vector<double>& x, std::size_t offset) {
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(offset), n_, in_);
    fftw_execute(plan_);
  }
  std::complex<double> bin(int k) const { return {out_[k][0], out_[k][1]}; }

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace

FrfMeasurement estimate_frf(const std::vector<double>& u, const std::vector<double>& y, const MultisineSpec& spec,
                            const std::vector<int>& excited_lines, const FrfOptions& options) {
  spec.validate();
  const int N = spec.period_samples();
  if (u.size() != y.size()) fail(ErrorKind::shape, "estimate_frf: input and output lengths differ");
  if (u.empty() || u.size() % static_cast<std::size_t>(N) != 0)
    fail(ErrorKind::shape, "estimate_frf: record length " + std::to_string(u.size()) +
                               " is not a whole number of periods of " + std::to_string(N) + " samples");
  const int total = static_cast<int>(u.size() / static_cast<std::size_t>(N));
  const int first = options.discard_first_period ? 1 : 0;
  const int P = total - first;
  if (P < 2) fail(ErrorKind::shape, "estimate_frf: at least two averaged periods are required");
  for (int k : excited_lines)
    if (k <= 0 || k >= (N + 1) / 2) fail(ErrorKind::domain, "estimate_frf: excited line outside (0, N/2)");

  const int n_bins = (N + 1) / 2;  // lines 1 .. n_bins-1 lie strictly below Nyquist
  std::vector<std::vector<std::complex<double>>> U(static_cast<std::size_t>(P)), Y(static_cast<std::size_t>(P));
  {
    RealFft fft(N);
    for (int p = 0; p < P; ++p) {
      const std::size_t offset = static_cast<std::size_t>(first + p) * static_cast<std::size_t>(N);
      auto& Up = U[static_cast<std::size_t>(p)];
      auto& Yp = Y[static_cast<std::size_t>(p)];
      fft.run(u, offset);
      for (int k = 0; k < n_bins; ++k) Up.push_back(fft.bin(k));
      fft.run(y, offset);
      for (int k = 0; k < n_bins; ++k) Yp.push_back(fft.bin(k));
    }
  }

  double u_max = 0.0;
  for (int k : excited_lines) u_max = std::max(u_max, std::abs(U[0][static_cast<std::size_t>(k)]));

  FrfMeasurement out;
  const std::set<int> excited(excited_lines.begin(), excited_lines.end());
  for (int k : excited) {
    const auto kk = static_cast<std::size_t>(k);
    bool weak = false;
    for (int p = 0; p < P; ++p) weak |= std::abs(U[static_cast<std::size_t>(p)][kk]) <= options.input_floor * u_max;
    if (weak) {
      out.warnings.push_back("line " + std::to_string(k) + " dropped: input below numerical floor");
      continue;
    }
    std::vector<std::complex<double>> ratios;
    double level = 0.0;
    for (int p = 0; p < P; ++p) {
      ratios.push_back(Y[static_cast<std::size_t>(p)][kk] / U[static_cast<std::size_t>(p)][kk]);
      level += std::abs(Y[static_cast<std::size_t>(p)][kk]);
    }
    std::complex<double> mean = 0.0;
    for (auto r : ratios) mean += r;
    mean /= static_cast<double>(P);
    double ss = 0.0;
    for (auto r : ratios) ss += std::norm(r - mean);
    out.freqs.push_back(k * spec.f0);
    out.response.push_back(mean);
    out.variance.push_back(ss / (P - 1) / P);
    out.output_level.push_back(level / P);
  }

  for (int k = 1; k < n_bins; ++k) {
    if (excited.count(k)) continue;
    double level = 0.0;
    for (int p = 0; p < P; ++p) level += std::abs(Y[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)]);
    DetectionLine d{k, k * spec.f0, level / P};
    (k % 2 == 0 ? out.nonexcited_even : out.nonexcited_odd).push_back(d);
  }
  return out;
}

FrfMeasurement frf_from_samples(std::vector<double> freqs_hz, std::vector<std::complex<double>> response) {
  if (freqs_hz.size() != response.size()) fail(ErrorKind::dimension, "frf_from_samples: length mismatch");
  for (std::size_t i = 1; i < freqs_hz.size(); ++i)
    if (!(freqs_hz[i] > freqs_hz[i - 1])) fail(ErrorKind::domain, "frf_from_samples: frequencies must increase");
  FrfMeasurement out;
  out.variance.assign(freqs_hz.size(), 0.0);
  out.output_level.reserve(response.size());
  for (auto g : response) out.output_level.push_back(std::abs(g));
  out.freqs = std::move(freqs_hz);
  out.response = std::move(response);
  return out;
}

}  // namespace agrotrack::signals
