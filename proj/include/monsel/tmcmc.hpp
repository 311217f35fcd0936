#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "monsel/priors.hpp"
#include "monsel/random.hpp"

namespace monsel {

struct TmcmcConfig {
  double target_cov = 1.0;  // c.o.v. of the plausibility weights per stage
  double scale = 0.2;       // proposal covariance = scale^2 * weighted sample covariance
  int max_stages = 50;
  unsigned threads = 1;     // likelihood evaluation workers; results do not depend on it
};

void validate(const TmcmcConfig& cfg);

struct StageDiag {
  double beta = 0.0;
  double ess = 0.0;
  double acceptance_rate = 0.0;
  double log_mean_weight = 0.0;
};

struct PosteriorEnsemble {
  std::vector<std::string> names;
  SampleMatrix samples;                // n_s x dim
  std::vector<double> log_likelihood;  // per row, at beta = 1
  double log_evidence = 0.0;
  /// stages.front() is the prior draw (beta 0); stages.back().beta == 1.
  std::vector<StageDiag> stages;
  std::uint64_t seed = 0;

  std::size_t size() const { return static_cast<std::size_t>(samples.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(samples.cols()); }
  std::span<const double> row(std::size_t i) const {
    return {samples.data() + i * dim(), dim()};
  }
};

/// Returns -inf outside the support.
using LogDensity = std::function<double(std::span<const double>)>;
using PriorSampler = std::function<SampleMatrix(std::size_t, const RandomStream&)>;

/// Transitional MCMC.
///
/// Tempers from the prior (beta = 0) to the posterior (beta = 1). Each stage
/// picks the exponent increment by bisection so the c.o.v. of the weights
/// exp(dbeta * logL) equals cfg.target_cov (or jumps straight to 1 when that
/// is already below target), resamples multinomially by the normalized
/// weights, then applies one Metropolis-Hastings move per particle with a
/// Gaussian proposal whose covariance is cfg.scale^2 times the weighted
/// sample covariance. The log evidence is the sum over stages of
/// log(mean weight).
///
/// Random numbers come from per-stage and per-particle substreams of `rng`,
/// so the ensemble is bit-identical for any cfg.threads.
PosteriorEnsemble run_tmcmc(const LogDensity& log_prior, const PriorSampler& prior_sampler,
                            const LogDensity& log_likelihood, std::size_t n_s,
                            const RandomStream& rng, const TmcmcConfig& cfg);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace monsel
