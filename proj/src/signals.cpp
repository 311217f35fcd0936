#include "monsel/signals.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "monsel/dataset_io.hpp"
#include "monsel/errors.hpp"

namespace monsel {

namespace {

// The FFTW planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// |X_k|^2 for k = 0..n/2 of a real input of length n.
std::vector<double> real_dft_power(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  const std::size_t bins = x.size() / 2 + 1;
  double* in = fftw_alloc_real(x.size());
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  std::copy(x.begin(), x.end(), in);
  fftw_execute(plan);
  std::vector<double> power(bins);
  for (std::size_t k = 0; k < bins; ++k) power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return power;
}

}  // namespace

void validate(const TimeSeries& ts) {
  if (!(ts.dt > 0.0) || !std::isfinite(ts.dt)) throw_input("TimeSeries", "dt must be > 0");
  if (ts.samples.empty()) throw_input("TimeSeries", "no samples");
  for (double v : ts.samples)
    if (!std::isfinite(v)) throw_input("TimeSeries", "non-finite sample in '" + ts.label + "'");
}

void validate(const MagnitudeSpectrum& spec) {
  if (spec.freqs.size() != spec.mags.size())
    throw_input("MagnitudeSpectrum", "freqs/mags length mismatch");
  if (spec.freqs.size() < 2) throw_input("MagnitudeSpectrum", "need at least two bins");
  if (spec.freqs.front() != 0.0) throw_input("MagnitudeSpectrum", "grid must start at 0 Hz");
  const double df = spec.bin_width();
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (!(spec.mags[j] >= 0.0) || !std::isfinite(spec.mags[j]))
      throw_input("MagnitudeSpectrum", "magnitudes must be finite and nonnegative");
    if (j > 0 && std::abs(spec.freqs[j] - spec.freqs[j - 1] - df) > 1e-9 * df)
      throw_input("MagnitudeSpectrum", "grid must be equispaced");
  }
  if (!(df > 0.0)) throw_input("MagnitudeSpectrum", "grid must be strictly increasing");
}

TimeSeries load_timeseries(const std::string& path, const std::string& column) {
  return column_as_timeseries(read_numeric_csv(path), column, path);
}

MagnitudeSpectrum fft_magnitude(const TimeSeries& ts, double f_max) {
  validate(ts);
  const std::size_t n = ts.size();
  if (n < 4) throw_input("fft_magnitude", "series needs at least 4 samples");
  const double nyquist = 0.5 / ts.dt;
  if (!(f_max >= 0.0) || f_max > nyquist * (1.0 + 1e-12))
    throw_input("fft_magnitude", "f_max must lie in [0, Nyquist]");

  const double span = static_cast<double>(n) * ts.dt;
  const std::size_t bins =
      std::min(n / 2 + 1, static_cast<std::size_t>(std::floor(f_max * span + 1e-9)) + 1);

  const auto power = real_dft_power(ts.samples);
  MagnitudeSpectrum out;
  out.source_label = ts.label;
  out.freqs.resize(bins);
  out.mags.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.freqs[k] = static_cast<double>(k) / span;
    out.mags[k] = std::sqrt(power[k]);
  }
  return out;
}

std::size_t default_segment_length(std::size_t n) {
  const double target = static_cast<double>(n) / 8.0;
  std::size_t p = 8;
  while (p * 2 <= n && static_cast<double>(p) * 1.5 <= target) p *= 2;
  return std::min(p, n);
}

PsdEstimate welch_psd(const TimeSeries& ts, std::size_t segment_length, double overlap_fraction,
                      WindowKind window) {
  validate(ts);
  if (segment_length < 2) throw_input("welch_psd", "segment_length must be at least 2");
  if (segment_length > ts.size()) throw_input("welch_psd", "segment longer than series");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
    throw_input("welch_psd", "overlap_fraction must lie in [0, 1)");

  const std::size_t len = segment_length;
  const auto overlap = static_cast<std::size_t>(std::floor(overlap_fraction * static_cast<double>(len)));
  const std::size_t hop = std::max<std::size_t>(1, len - overlap);

  std::vector<double> w(len, 1.0);
  if (window == WindowKind::hann) {
    // Periodic Hann.
    for (std::size_t i = 0; i < len; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
  }
  double wss = 0.0;
  for (double v : w) wss += v * v;

  const double fs = 1.0 / ts.dt;
  const std::size_t bins = len / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::vector<double> seg(len);
  std::size_t count = 0;
  for (std::size_t start = 0; start + len <= ts.size(); start += hop) {
    for (std::size_t i = 0; i < len; ++i) seg[i] = ts.samples[start + i] * w[i];
    const auto p = real_dft_power(seg);
    for (std::size_t k = 0; k < bins; ++k) acc[k] += p[k];
    ++count;
  }

  PsdEstimate out;
  out.segment_length = len;
  out.overlap_fraction = overlap_fraction;
  out.window_name = window_name(window);
  out.freqs.resize(bins);
  out.power.resize(bins);
  const double scale = 1.0 / (fs * wss * static_cast<double>(count));
  for (std::size_t k = 0; k < bins; ++k) {
    const bool unpaired = k == 0 || (len % 2 == 0 && k == len / 2);
    out.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(len);
    out.power[k] = acc[k] * scale * (unpaired ? 1.0 : 2.0);
  }
  return out;
}

std::vector<PeakInfo> detect_peaks(std::span<const double> freqs, std::span<const double> values,
                                   double min_prominence_ratio, double min_separation_hz) {
  if (freqs.size() != values.size()) throw_input("detect_peaks", "length mismatch");
  if (values.empty()) throw_input("detect_peaks", "empty input");
  if (!(min_prominence_ratio > 0.0 && min_prominence_ratio <= 1.0))
    throw_input("detect_peaks", "min_prominence_ratio must lie in (0, 1]");

  const std::size_t n = values.size();
  const double vmax = *std::max_element(values.begin(), values.end());
  const double threshold = min_prominence_ratio * vmax;
  if (!(vmax > 0.0)) return {};

  std::vector<PeakInfo> found;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(values[i] > values[i - 1])) {
      ++i;
      continue;
    }
    // Walk across a plateau; the peak sits at its middle.
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    if (j + 1 >= n || !(values[j + 1] < values[i])) {
      i = j + 1;
      continue;
    }
    const std::size_t mid = (i + j) / 2;
    const double h = values[i];

    double left_min = h;
    for (std::size_t l = i; l-- > 0;) {
      if (values[l] > h) break;
      left_min = std::min(left_min, values[l]);
    }
    double right_min = h;
    for (std::size_t r = j + 1; r < n; ++r) {
      if (values[r] > h) break;
      right_min = std::min(right_min, values[r]);
    }
    const double prominence = h - std::max(left_min, right_min);
    if (prominence > 0.0 && prominence >= threshold)
      found.push_back({freqs[mid], h, prominence, mid});
    i = j + 1;
  }

  // Keep the tallest peaks first when enforcing separation.
  std::vector<std::size_t> order(found.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return found[a].power > found[b].power; });
  std::vector<PeakInfo> kept;
  for (std::size_t k : order) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const PeakInfo& p) {
      return std::abs(p.freq_hz - found[k].freq_hz) < min_separation_hz;
    });
    if (!clash) kept.push_back(found[k]);
  }
  std::sort(kept.begin(), kept.end(),
            [](const PeakInfo& a, const PeakInfo& b) { return a.freq_hz < b.freq_hz; });
  return kept;
}

std::vector<PeakInfo> detect_peaks(const PsdEstimate& psd, double min_prominence_ratio,
                                   double min_separation_hz) {
  return detect_peaks(psd.freqs, psd.power, min_prominence_ratio, min_separation_hz);
}

std::vector<PeakInfo> detect_peaks(const MagnitudeSpectrum& spec, double min_prominence_ratio,
                                   double min_separation_hz) {
  return detect_peaks(spec.freqs, spec.mags, min_prominence_ratio, min_separation_hz);
}

WindowKind parse_window(const std::string& name) {
  if (name == "hann") return WindowKind::hann;
  if (name == "rectangular") return WindowKind::rectangular;
  throw_input("parse_window", "unknown window '" + name + "' (expected hann or rectangular)");
}

std::string window_name(WindowKind w) {
  return w == WindowKind::hann ? "hann" : "rectangular";
}

}  // namespace monsel
