#include "monsel/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "monsel/dataset_io.hpp"
#include "monsel/errors.hpp"

namespace monsel {

NoiseMode parse_noise_mode(const std::string& s) {
  if (s == "global_norm") return NoiseMode::global_norm;
  if (s == "per_bin") return NoiseMode::per_bin;
  throw_input("parse_noise_mode", "unknown noise_mode '" + s + "' (expected global_norm or per_bin)");
}

std::string to_string(NoiseMode m) { return m == NoiseMode::global_norm ? "global_norm" : "per_bin"; }

NoiseModel make_noise_model(const MagnitudeSpectrum& observed, double c, NoiseMode mode) {
  if (!(c > 0.0) || !std::isfinite(c)) throw_input("make_noise_model", "c must be > 0");
  NoiseModel nm;
  nm.c = c;
  nm.mode = mode;
  double ss = 0.0;
  for (double y : observed.mags) ss += y * y;
  nm.sigma2 = c * c * ss;
  if (!(nm.sigma2 > 0.0)) throw_input("make_noise_model", "observed spectrum is identically zero");
  if (mode == NoiseMode::per_bin) {
    nm.bin_variance.resize(observed.mags.size());
    for (std::size_t j = 0; j < observed.mags.size(); ++j) {
      nm.bin_variance[j] = c * c * observed.mags[j] * observed.mags[j];
      if (!(nm.bin_variance[j] > 0.0))
        throw_input("make_noise_model", "per_bin mode needs strictly positive observed magnitudes");
    }
  }
  return nm;
}

std::vector<double> residual(ModelId id, std::span<const double> theta,
                             const MagnitudeSpectrum& observed, const MagnitudeSpectrum& input_spec) {
  if (observed.size() != input_spec.size()) throw_input("residual", "grid mismatch");
  for (std::size_t j = 0; j < observed.size(); ++j)
    if (observed.freqs[j] != input_spec.freqs[j]) throw_input("residual", "grid mismatch");
  const MagnitudeSpectrum pred = predict(to_physical(id, theta), input_spec);
  std::vector<double> eta(observed.size());
  for (std::size_t j = 0; j < eta.size(); ++j) eta[j] = observed.mags[j] - pred.mags[j];
  return eta;
}

double log_likelihood_of_residual(std::span<const double> eta, const NoiseModel& noise) {
  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  double out = 0.0;
  if (noise.mode == NoiseMode::global_norm) {
    double q = 0.0;
    for (double e : eta) q += e * e;
    out = -0.5 * static_cast<double>(eta.size()) * (log_two_pi + std::log(noise.sigma2)) -
          q / (2.0 * noise.sigma2);
  } else {
    if (noise.bin_variance.size() != eta.size())
      throw_input("log_likelihood", "noise model built for a different grid");
    for (std::size_t j = 0; j < eta.size(); ++j) {
      const double v = noise.bin_variance[j];
      out += -0.5 * (log_two_pi + std::log(v)) - eta[j] * eta[j] / (2.0 * v);
    }
  }
  if (!std::isfinite(out)) throw_numerical("log_likelihood", "non-finite residual");
  return out;
}

double log_likelihood(ModelId id, std::span<const double> theta, const MagnitudeSpectrum& observed,
                      const MagnitudeSpectrum& input_spec, const NoiseModel& noise) {
  return log_likelihood_of_residual(residual(id, theta, observed, input_spec), noise);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw_input("quantile", "empty sample");
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double a = values[lo];
  if (frac == 0.0 || lo + 1 >= values.size()) return a;
  const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return a + frac * (b - a);
}

PosteriorBands posterior_bands(const SampleMatrix& samples, const Predictor& predictor,
                               std::span<const double> freqs) {
  const auto n = static_cast<std::size_t>(samples.rows());
  const auto dim = static_cast<std::size_t>(samples.cols());
  if (n == 0) throw_input("posterior_bands", "empty ensemble");
  const std::size_t nf = freqs.size();

  std::vector<std::vector<double>> by_bin(nf, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto pred = predictor(std::span<const double>(samples.data() + i * dim, dim));
    if (pred.size() != nf) throw_input("posterior_bands", "predictor grid mismatch");
    for (std::size_t j = 0; j < nf; ++j) by_bin[j][i] = pred[j];
  }

  PosteriorBands out;
  out.freqs.assign(freqs.begin(), freqs.end());
  out.mean.resize(nf);
  out.lo95.resize(nf);
  out.hi95.resize(nf);
  for (std::size_t j = 0; j < nf; ++j) {
    double s = 0.0;
    for (double v : by_bin[j]) s += v;
    const auto [lo, hi] = std::minmax_element(by_bin[j].begin(), by_bin[j].end());
    // Rounding in the sum can push the mean of equal values just outside them.
    out.mean[j] = std::clamp(s / static_cast<double>(n), *lo, *hi);
    out.lo95[j] = quantile(by_bin[j], 0.025);
    out.hi95[j] = quantile(std::move(by_bin[j]), 0.975);
  }
  return out;
}

Predictor spectrum_predictor(ModelId id, const MagnitudeSpectrum& input_spec) {
  return [id, &input_spec](std::span<const double> theta) {
    return predict(to_physical(id, theta), input_spec).mags;
  };
}

PosteriorEnsemble calibrate_model(ModelId id, const PriorSpec& prior,
                                  const MagnitudeSpectrum& observed,
                                  const MagnitudeSpectrum& input_spec, const NoiseModel& noise,
                                  std::size_t n_s, const RandomStream& rng, const TmcmcConfig& cfg) {
  validate(prior);
  if (prior.model != id) throw_input("calibrate_model", "prior built for a different model");
  validate(observed);
  validate(input_spec);

  const auto log_prior = [&prior](std::span<const double> th) {
    return in_support(th) ? log_prior_pdf(prior, th) : -std::numeric_limits<double>::infinity();
  };
  const auto sampler = [&prior](std::size_t n, const RandomStream& s) {
    return sample_prior(prior, n, s);
  };
  const auto log_l = [&](std::span<const double> th) {
    try {
      return log_likelihood(id, th, observed, input_spec, noise);
    } catch (const NumericalError&) {
      // Exact undamped resonance on a grid point: zero plausibility.
      return -std::numeric_limits<double>::infinity();
    }
  };
  PosteriorEnsemble ens = run_tmcmc(log_prior, sampler, log_l, n_s, rng, cfg);
  ens.names = prior.names();
  return ens;
}

void write_ensemble(const PosteriorEnsemble& ens, const std::string& csv_path,
                    const std::string& json_path, const TmcmcConfig& cfg, double c,
                    NoiseMode noise_mode, ModelId id) {
  std::vector<std::vector<double>> cols(ens.dim(), std::vector<double>(ens.size()));
  for (std::size_t i = 0; i < ens.size(); ++i)
    for (std::size_t d = 0; d < ens.dim(); ++d)
      cols[d][i] = ens.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
  write_numeric_csv(csv_path, ens.names, cols);

  nlohmann::ordered_json j;
  j["model"] = to_string(id);
  j["seed"] = ens.seed;
  j["n_s"] = ens.size();
  j["log_evidence"] = ens.log_evidence;
  j["config"] = {{"target_cov", cfg.target_cov},
                 {"scale", cfg.scale},
                 {"max_stages", cfg.max_stages},
                 {"c", c},
                 {"noise_mode", to_string(noise_mode)}};
  auto& stages = j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : ens.stages)
    stages.push_back({{"beta", s.beta},
                      {"ess", s.ess},
                      {"acceptance_rate", s.acceptance_rate},
                      {"log_mean_weight", s.log_mean_weight}});
  write_file_atomic(json_path, j.dump(2) + "\n");
}

PosteriorEnsemble read_ensemble(const std::string& csv_path, const std::string& json_path) {
  const CsvTable table = read_numeric_csv(csv_path);
  PosteriorEnsemble ens;
  ens.names = table.header;
  const std::size_t n = table.rows();
  if (n == 0) throw_input("read_ensemble", "'" + csv_path + "' has no rows");
  ens.samples.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t d = 0; d < table.columns.size(); ++d)
    for (std::size_t i = 0; i < n; ++i)
      ens.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = table.columns[d][i];

  std::ifstream in(json_path);
  if (!in) throw_input("read_ensemble", "cannot open '" + json_path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    ens.seed = j.at("seed").get<std::uint64_t>();
    ens.log_evidence = j.at("log_evidence").get<double>();
    for (const auto& s : j.at("stages"))
      ens.stages.push_back({s.at("beta").get<double>(), s.at("ess").get<double>(),
                            s.at("acceptance_rate").get<double>(),
                            s.at("log_mean_weight").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw_input("read_ensemble", "'" + json_path + "': " + e.what());
  }
  return ens;
}

void write_bands_csv(const std::string& path, const PosteriorBands& bands) {
  write_numeric_csv(path, {"freq_hz", "mean", "lo95", "hi95"},
                    {bands.freqs, bands.mean, bands.lo95, bands.hi95});
}

}  // namespace monsel
