#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace monsel {

/// Uniformly sampled sensor record.
struct TimeSeries {
  std::vector<double> samples;
  double dt = 0.0;  // seconds
  std::string label;

  std::size_t size() const { return samples.size(); }
};

/// One-sided magnitude spectrum on an equispaced grid starting at 0 Hz.
struct MagnitudeSpectrum {
  std::vector<double> freqs;  // Hz
  std::vector<double> mags;
  std::string source_label;

  std::size_t size() const { return freqs.size(); }
  double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

enum class WindowKind { hann, rectangular };

struct PsdEstimate {
  std::vector<double> freqs;  // Hz
  std::vector<double> power;  // unit^2 / Hz
  std::size_t segment_length = 0;
  double overlap_fraction = 0.0;
  std::string window_name;

  double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

struct PeakInfo {
  double freq_hz = 0.0;
  double power = 0.0;
  double prominence = 0.0;
  std::size_t bin = 0;
};

void validate(const TimeSeries& ts);
void validate(const MagnitudeSpectrum& spec);

/// Reads `column` from a CSV whose first column is `t`. The sampling step is
/// inferred from the time column; grids with relative jitter above 1e-6 are
/// rejected.
TimeSeries load_timeseries(const std::string& path, const std::string& column);

/// Raw one-sided |DFT| (no 1/N scaling, no windowing) restricted to bins with
/// 0 <= f <= f_max. Bin spacing is 1/(N*dt). A constant series c of length N
/// has mags[0] == N*|c|; a bin-aligned unit sine has N/2 at its bin.
MagnitudeSpectrum fft_magnitude(const TimeSeries& ts, double f_max);

/// Welch averaged periodogram, one-sided, density-scaled by 1/(fs * sum w^2)
/// so that sum(power) * df equals the mean-square of the windowed data for a
/// rectangular window. No detrending is applied.
PsdEstimate welch_psd(const TimeSeries& ts, std::size_t segment_length, double overlap_fraction,
                      WindowKind window);

/// N/8 rounded to the nearest power of two (ties go up), at least 8 and at most N.
std::size_t default_segment_length(std::size_t n);

/// Interior local maxima with topographic prominence at least
/// min_prominence_ratio * max(values). When two peaks are closer than
/// min_separation_hz the lower one is dropped. Sorted by frequency.
std::vector<PeakInfo> detect_peaks(std::span<const double> freqs, std::span<const double> values,
                                   double min_prominence_ratio, double min_separation_hz);
std::vector<PeakInfo> detect_peaks(const PsdEstimate& psd, double min_prominence_ratio,
                                   double min_separation_hz);
std::vector<PeakInfo> detect_peaks(const MagnitudeSpectrum& spec, double min_prominence_ratio,
                                   double min_separation_hz);

WindowKind parse_window(const std::string& name);
std::string window_name(WindowKind w);

}  // namespace monsel
