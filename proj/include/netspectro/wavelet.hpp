#ifndef NETSPECTRO_WAVELET_HPP
#define NETSPECTRO_WAVELET_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "netspectro/detail/fft.hpp"
#include "netspectro/detail/stats.hpp"
#include "netspectro/errors.hpp"
#include "netspectro/spectral.hpp"
#include "netspectro/trace.hpp"

namespace netspectro {

inline constexpr double default_omega0 = 6.0;

/// Dyadic scale ladder: s0 * 2^(i / voices), i = 0 .. octaves*voices.
struct scale_grid {
  double s0 = 2.0;
  int octaves = 12;
  int voices_per_octave = 8;

  std::vector<double> scales() const {
    if (!(s0 > 0.0) || octaves < 1 || voices_per_octave < 1)
      throw parameter_error("scale grid needs s0 > 0, octaves >= 1, voices >= 1");
    const int total = octaves * voices_per_octave;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(total) + 1);
    for (int i = 0; i <= total; ++i)
      out.push_back(s0 * std::exp2(static_cast<double>(i) / voices_per_octave));
    return out;
  }
};

/// Fourier period (in samples) whose Morlet response peaks at this scale.
inline double scale_to_period(double scale, double omega0 = default_omega0) {
  return 4.0 * std::numbers::pi_v<double> * scale /
         (omega0 + std::sqrt(2.0 + omega0 * omega0));
}

/// Inverse of scale_to_period.
inline double period_to_scale(double period, double omega0 = default_omega0) {
  return period * (omega0 + std::sqrt(2.0 + omega0 * omega0)) /
         (4.0 * std::numbers::pi_v<double>);
}

/// Largest trustworthy period per column, in samples: beyond it the wavelet
/// envelope's e-folding distance reaches past the nearer series edge.
inline std::vector<double> cone_of_influence(std::size_t n, double omega0 = default_omega0) {
  std::vector<double> coi(n);
  for (std::size_t b = 0; b < n; ++b) {
    const double d = static_cast<double>(std::min(b, n - 1 - b));
    coi[b] = scale_to_period(d / std::numbers::sqrt2_v<double>, omega0);
  }
  return coi;
}

/// Magnitude of the continuous wavelet transform, one row per scale
/// (ascending) and one column per input sample. times/periods/coi are in
/// seconds.
struct scalogram {
  std::vector<std::vector<double>> magnitude;
  std::vector<double> times;
  std::vector<double> periods;
  std::vector<double> coi;
  double omega0 = default_omega0;
  double p = 0.0;

  std::size_t rows() const { return magnitude.size(); }
  std::size_t cols() const { return times.size(); }
};

/// A stretch of columns whose in-band magnitude rises above the noise floor.
struct transient_band {
  double period_lo_s = 0.0;
  double period_hi_s = 0.0;
  double start_s = 0.0;
  double end_s = 0.0;
  double mean_magnitude = 0.0;
};

/// Complex Morlet coefficients T(a, b) = a^{-1/2} sum_t x(t) conj(psi((t-b)/a)),
/// indexed [scale][sample]. The wavelet is truncated where |eta| > 6, by which
/// point the Gaussian envelope is below 2e-8. Evaluated as a zero-padded
/// fast correlation, identical to the direct sum up to rounding.
inline std::vector<std::vector<std::complex<double>>> cwt_complex(
    const centered_series& s, const scale_grid& grid = {},
    double omega0 = default_omega0) {
  const std::size_t n = s.values.size();
  if (n < 16) throw series_too_short(n);
  if (!(s.p > 0.0)) throw non_positive_period();
  if (!(omega0 > 0.0)) throw parameter_error("omega0 must be positive");
  const std::vector<double> scales = grid.scales();
  const double max_period = scale_to_period(scales.back(), omega0);
  if (max_period > static_cast<double>(n)) throw grid_exceeds_series(max_period, n);

  const auto umax = static_cast<std::size_t>(std::floor(6.0 * scales.back()));
  const std::size_t len = detail::next_fast_len(n + 2 * umax + 1);

  std::vector<std::complex<double>> sig(len);
  for (std::size_t t = 0; t < n; ++t) sig[t] = s.values[t];
  detail::fft_forward(sig);

  const double envelope_norm = std::pow(std::numbers::pi_v<double>, -0.25);
  std::vector<std::vector<std::complex<double>>> rows;
  rows.reserve(scales.size());
  std::vector<std::complex<double>> ker(len), prod(len);
  for (const double a : scales) {
    const auto u = static_cast<long>(std::floor(6.0 * a));
    const double norm = envelope_norm / std::sqrt(a);
    std::fill(ker.begin(), ker.end(), std::complex<double>{});
    for (long d = -u; d <= u; ++d) {
      const double eta = static_cast<double>(d) / a;
      const std::complex<double> h =
          norm * std::exp(-0.5 * eta * eta) *
          std::exp(std::complex<double>(0.0, -omega0 * eta));
      const std::size_t idx =
          static_cast<std::size_t>(((-d) % static_cast<long>(len) + static_cast<long>(len)) %
                                   static_cast<long>(len));
      ker[idx] = h;
    }
    detail::fft_forward(ker);
    for (std::size_t i = 0; i < len; ++i) prod[i] = sig[i] * ker[i];
    detail::fft_inverse(prod);
    rows.emplace_back(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return rows;
}

/// Scalogram of |T(a, b)| over the scale grid, with per-column cone of
/// influence. All axes in seconds.
inline scalogram cwt(const centered_series& s, const scale_grid& grid = {},
                     double omega0 = default_omega0) {
  const auto coeff = cwt_complex(s, grid, omega0);
  const std::size_t n = s.values.size();

  scalogram sg;
  sg.omega0 = omega0;
  sg.p = s.p;
  const std::vector<double> scales = grid.scales();
  sg.periods.reserve(scales.size());
  for (double a : scales) sg.periods.push_back(scale_to_period(a, omega0) * s.p);
  sg.times.resize(n);
  for (std::size_t b = 0; b < n; ++b) sg.times[b] = static_cast<double>(b) * s.p;
  // Stored coi is capped at the largest grid period: nothing beyond it is
  // represented, so nothing beyond it can be trusted or mistrusted.
  sg.coi = cone_of_influence(n, omega0);
  for (double& v : sg.coi) v = std::min(v * s.p, sg.periods.back());

  sg.magnitude.reserve(coeff.size());
  for (const auto& row : coeff) {
    std::vector<double> mag(n);
    for (std::size_t b = 0; b < n; ++b) mag[b] = std::abs(row[b]);
    sg.magnitude.push_back(std::move(mag));
  }
  return sg;
}

namespace detail {

struct band_rows {
  std::size_t first = 0, last = 0;  // inclusive row range
  bool empty = true;
};

inline band_rows rows_in_band(const scalogram& sg, double period_lo_s, double period_hi_s) {
  band_rows r;
  for (std::size_t i = 0; i < sg.periods.size(); ++i) {
    if (sg.periods[i] < period_lo_s || sg.periods[i] > period_hi_s) continue;
    if (r.empty) r.first = i;
    r.last = i;
    r.empty = false;
  }
  return r;
}

// Mean in-band magnitude per column.
inline std::vector<double> band_column_means(const scalogram& sg, band_rows r) {
  const std::size_t n = sg.cols();
  std::vector<double> mean(n, 0.0);
  const double scale = 1.0 / static_cast<double>(r.last - r.first + 1);
  for (std::size_t i = r.first; i <= r.last; ++i)
    for (std::size_t b = 0; b < n; ++b) mean[b] += sg.magnitude[i][b] * scale;
  return mean;
}

}  // namespace detail

/// Time stretches where the mean magnitude across scales with periods in
/// [period_lo_s, period_hi_s] exceeds median + threshold_k * MAD of the
/// coi-valid columns. Above-threshold runs closer than the smoothing width
/// of the band's largest scale (3 scale-lengths, at least 3 columns) are
/// merged, and merged runs shorter than that width are dropped as noise.
/// Detection is hysteretic: a surviving run must also contain at least one
/// column at double the threshold excess (median + 2k * MAD), because the
/// wavelet's own smearing lets plain noise ride just over the single
/// threshold for longer than any run-length cutoff alone can filter.
inline std::vector<transient_band> detect_transient_bands(const scalogram& sg,
                                                          double period_lo_s,
                                                          double period_hi_s,
                                                          double threshold_k = 3.0) {
  if (!(period_lo_s > 0.0) || !(period_hi_s >= period_lo_s))
    throw parameter_error("period band must satisfy 0 < lo <= hi");
  const auto rows = detail::rows_in_band(sg, period_lo_s, period_hi_s);
  if (rows.empty) throw empty_band();
  const std::size_t n = sg.cols();

  const double band_hi = sg.periods[rows.last];
  std::size_t b0 = n, b1 = 0;
  for (std::size_t b = 0; b < n; ++b) {
    if (sg.coi[b] >= band_hi) {
      if (b0 == n) b0 = b;
      b1 = b;
    }
  }
  if (b0 == n) return {};  // the whole band sits outside the cone everywhere

  const std::vector<double> mean = detail::band_column_means(sg, rows);
  const std::vector<double> valid(mean.begin() + static_cast<std::ptrdiff_t>(b0),
                                  mean.begin() + static_cast<std::ptrdiff_t>(b1) + 1);
  const double med = detail::median(valid);
  const double mad = detail::mad(valid);
  const double thr = med + threshold_k * mad;
  const double thr_core = med + 2.0 * threshold_k * mad;
  // Relative slack so exactly-constant magnitude still counts as "above".
  const double slack = 1e-9 * (std::fabs(med) + mad);

  const double a_hi = period_to_scale(band_hi / sg.p, sg.omega0);
  const std::size_t width =
      std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(3.0 * a_hi)));

  // Collect raw above-threshold runs within the valid column range. A dead
  // column (zero magnitude) is never "above": an all-zero band has no bands.
  const auto above = [&](std::size_t b) { return mean[b] > 0.0 && mean[b] >= thr - slack; };
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t b = b0; b <= b1;) {
    if (above(b)) {
      std::size_t e = b;
      while (e + 1 <= b1 && above(e + 1)) ++e;
      runs.emplace_back(b, e);
      b = e + 1;
    } else {
      ++b;
    }
  }
  // Bridge gaps narrower than the smoothing width, then drop short runs.
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& r : runs) {
    if (!merged.empty() && r.first - merged.back().second - 1 < width)
      merged.back().second = r.second;
    else
      merged.push_back(r);
  }

  std::vector<transient_band> bands;
  for (const auto& r : merged) {
    if (r.second - r.first + 1 < width) continue;
    bool has_core = false;
    for (std::size_t b = r.first; b <= r.second && !has_core; ++b)
      has_core = mean[b] >= thr_core - slack;
    if (!has_core) continue;
    transient_band tb;
    tb.period_lo_s = sg.periods[rows.first];
    tb.period_hi_s = sg.periods[rows.last];
    tb.start_s = sg.times[r.first];
    tb.end_s = sg.times[r.second] + sg.p;
    double acc = 0.0;
    for (std::size_t b = r.first; b <= r.second; ++b) acc += mean[b];
    tb.mean_magnitude = acc / static_cast<double>(r.second - r.first + 1);
    bands.push_back(tb);
  }
  return bands;
}

/// Dominant oscillation period (seconds) of a band's mean magnitude over
/// time: the top periodogram peak of the coi-valid column-mean series,
/// localized on a 4x refined frequency grid. Throws no_peak when the
/// envelope has no significant oscillation.
inline double band_envelope_period(const scalogram& sg, double period_lo_s,
                                   double period_hi_s) {
  if (!(period_lo_s > 0.0) || !(period_hi_s >= period_lo_s))
    throw parameter_error("period band must satisfy 0 < lo <= hi");
  const auto rows = detail::rows_in_band(sg, period_lo_s, period_hi_s);
  if (rows.empty) throw empty_band();
  const std::size_t n = sg.cols();

  const double band_hi = sg.periods[rows.last];
  std::size_t b0 = n, b1 = 0;
  for (std::size_t b = 0; b < n; ++b) {
    if (sg.coi[b] >= band_hi) {
      if (b0 == n) b0 = b;
      b1 = b;
    }
  }
  if (b0 == n || b1 - b0 + 1 < 16) throw no_peak();

  const std::vector<double> mean = detail::band_column_means(sg, rows);
  centered_series env;
  env.p = sg.p;
  env.values.assign(mean.begin() + static_cast<std::ptrdiff_t>(b0),
                    mean.begin() + static_cast<std::ptrdiff_t>(b1) + 1);
  double avg = 0.0;
  for (double v : env.values) avg += v;
  avg /= static_cast<double>(env.values.size());
  for (double& v : env.values) v -= avg;
  env.mean_removed = avg;

  const acvf_series a = acvf(env);
  const spectrum pg = periodogram(a, 4 * a.max_lag() + 1);
  const std::vector<spectral_peak> peaks = detect_peaks(pg);
  if (peaks.empty()) throw no_peak();
  return peaks.front().period_s;
}

}  // namespace netspectro

#endif
