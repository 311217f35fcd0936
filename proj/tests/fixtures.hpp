#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "monsel/pipeline.hpp"
#include "monsel/synth_lab.hpp"
#include "monsel/tmcmc.hpp"

namespace fixture {

/// log N(1; 0, 2): evidence of one unit-noise observation x = 1 under a N(0, 1) prior.
inline const double kConjugateLogEvidence = -0.5 * std::log(4.0 * std::numbers::pi) - 0.25;

inline double std_normal_logpdf(double x, double mean, double var) {
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * (x - mean) * (x - mean) / var;
}

inline monsel::PosteriorEnsemble run_conjugate(std::uint64_t seed, std::size_t n_s,
                                               unsigned threads = 1) {
  using namespace monsel;
  const LogDensity log_prior = [](std::span<const double> th) {
    return std_normal_logpdf(th[0], 0.0, 1.0);
  };
  const LogDensity log_l = [](std::span<const double> th) {
    return std_normal_logpdf(1.0, th[0], 1.0);
  };
  const PriorSampler sampler = [](std::size_t n, const RandomStream& rng) {
    SampleMatrix s(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
      RandomStream r = rng.substream(i);
      s(static_cast<Eigen::Index>(i), 0) = r.normal();
    }
    return s;
  };
  TmcmcConfig cfg;
  cfg.threads = threads;
  return run_tmcmc(log_prior, sampler, log_l, n_s, RandomStream(seed), cfg);
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

inline Moments column_moments(const monsel::SampleMatrix& s, Eigen::Index col) {
  const double mean = s.col(col).mean();
  const double var = (s.col(col).array() - mean).square().sum() / static_cast<double>(s.rows() - 1);
  return {mean, var};
}

/// Default twin experiment with its band-limited spectra.
struct Twin {
  monsel::TwinConfig config;
  monsel::Dataset data;
  monsel::ChannelSpectra spectra;
};

inline Twin make_twin(std::uint64_t seed = 1, double f_max = 100.0) {
  Twin t;
  t.config.seed = seed;
  t.data = monsel::simulate_experiment(t.config);
  t.spectra = monsel::compute_spectra(t.data, f_max);
  return t;
}

}  // namespace fixture
