#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "monsel/oscillators.hpp"
#include "monsel/priors.hpp"
#include "monsel/signals.hpp"
#include "monsel/tmcmc.hpp"

namespace monsel {

enum class NoiseMode {
  global_norm,  // every bin has variance c^2 * ||y_obs||^2
  per_bin,      // bin j has variance c^2 * y_obs[j]^2
};

NoiseMode parse_noise_mode(const std::string& s);
std::string to_string(NoiseMode m);

/// Zero-mean Gaussian discrepancy with diagonal covariance built from the
/// observed spectrum.
struct NoiseModel {
  double c = 0.05;
  NoiseMode mode = NoiseMode::global_norm;
  double sigma2 = 0.0;              // common variance (global_norm)
  std::vector<double> bin_variance;  // per_bin only
};

NoiseModel make_noise_model(const MagnitudeSpectrum& observed, double c,
                            NoiseMode mode = NoiseMode::global_norm);

/// observed - prediction(theta, input_spec), with theta in sampled
/// coordinates (see PriorSpec).
std::vector<double> residual(ModelId id, std::span<const double> theta,
                             const MagnitudeSpectrum& observed, const MagnitudeSpectrum& input_spec);

/// Gaussian log density of a residual vector.
double log_likelihood_of_residual(std::span<const double> eta, const NoiseModel& noise);

double log_likelihood(ModelId id, std::span<const double> theta, const MagnitudeSpectrum& observed,
                      const MagnitudeSpectrum& input_spec, const NoiseModel& noise);

struct PosteriorBands {
  std::vector<double> freqs;
  std::vector<double> mean;
  std::vector<double> lo95;
  std::vector<double> hi95;
};

using Predictor = std::function<std::vector<double>(std::span<const double>)>;

/// Per-bin sample mean and 2.5% / 97.5% quantiles of the predictor output
/// across ensemble rows. Quantiles interpolate linearly between order
/// statistics at position p * (n - 1).
PosteriorBands posterior_bands(const SampleMatrix& samples, const Predictor& predictor,
                               std::span<const double> freqs);

/// Linear-interpolation quantile of an unsorted sample (copied).
double quantile(std::vector<double> values, double p);

/// Predictor mapping sampled coordinates to the predicted spectrum.
Predictor spectrum_predictor(ModelId id, const MagnitudeSpectrum& input_spec);

/// TMCMC calibration of one candidate model against the observed spectrum.
/// Proposals outside the positive orthant are rejected.
PosteriorEnsemble calibrate_model(ModelId id, const PriorSpec& prior,
                                  const MagnitudeSpectrum& observed,
                                  const MagnitudeSpectrum& input_spec, const NoiseModel& noise,
                                  std::size_t n_s, const RandomStream& rng, const TmcmcConfig& cfg);

/// Ensemble CSV (named coordinate columns) plus JSON sidecar with seed,
/// config, log evidence and stage diagnostics.
void write_ensemble(const PosteriorEnsemble& ens, const std::string& csv_path,
                    const std::string& json_path, const TmcmcConfig& cfg, double c,
                    NoiseMode noise_mode, ModelId id);
PosteriorEnsemble read_ensemble(const std::string& csv_path, const std::string& json_path);

void write_bands_csv(const std::string& path, const PosteriorBands& bands);

}  // namespace monsel
