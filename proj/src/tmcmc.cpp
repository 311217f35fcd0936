#include "monsel/tmcmc.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <spdlog/spdlog.h>

#include "monsel/errors.hpp"

namespace monsel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct WeightStats {
  double cov = 0.0;
  double log_mean = kNegInf;  // log mean of exp(dbeta * (logL - lmax))
};

WeightStats weight_stats(const std::vector<double>& log_l, double lmax, double dbeta) {
  const auto n = static_cast<double>(log_l.size());
  double s1 = 0.0, s2 = 0.0;
  for (double l : log_l) {
    const double w = std::exp(dbeta * (l - lmax));
    s1 += w;
    s2 += w * w;
  }
  const double mean = s1 / n;
  const double var = std::max(0.0, s2 / n - mean * mean);
  return {std::sqrt(var) / mean, std::log(mean)};
}

double choose_increment(const std::vector<double>& log_l, double lmax, double remaining,
                        double target_cov) {
  if (weight_stats(log_l, lmax, remaining).cov <= target_cov) return remaining;
  double lo = 0.0, hi = remaining;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * remaining; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (weight_stats(log_l, lmax, mid).cov > target_cov)
      hi = mid;
    else
      lo = mid;
  }
  // lo can be exactly zero when -inf likelihoods dominate; hi keeps progress.
  return lo > 0.0 ? lo : hi;
}

Eigen::MatrixXd proposal_factor(const SampleMatrix& x, const std::vector<double>& w, double scale) {
  const Eigen::Index dim = x.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index i = 0; i < x.rows(); ++i) mean += w[static_cast<std::size_t>(i)] * x.row(i).transpose();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd d = x.row(i).transpose() - mean;
    cov.noalias() += w[static_cast<std::size_t>(i)] * d * d.transpose();
  }
  cov *= scale * scale;

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Collapsed ensemble: fall back to a diagonal proposal with a small floor.
  Eigen::VectorXd sd(dim);
  for (Eigen::Index d = 0; d < dim; ++d)
    sd(d) = std::sqrt(std::max(cov(d, d), 1e-24 * std::max(1.0, mean(d) * mean(d))));
  return sd.asDiagonal();
}

double checked(double v, const char* what) {
  if (std::isnan(v)) throw_numerical("run_tmcmc", std::string(what) + " returned NaN");
  return v;
}

}  // namespace

void validate(const TmcmcConfig& cfg) {
  if (!(cfg.target_cov > 0.0) || !(cfg.scale > 0.0) || cfg.max_stages < 1)
    throw_input("TmcmcConfig", "target_cov, scale and max_stages must be positive");
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

PosteriorEnsemble run_tmcmc(const LogDensity& log_prior, const PriorSampler& prior_sampler,
                            const LogDensity& log_likelihood, std::size_t n_s,
                            const RandomStream& rng, const TmcmcConfig& cfg) {
  validate(cfg);
  if (n_s < 2) throw_input("run_tmcmc", "n_s must be at least 2");

  SampleMatrix x = prior_sampler(n_s, rng.substream(0));
  if (static_cast<std::size_t>(x.rows()) != n_s || x.cols() < 1)
    throw_input("run_tmcmc", "prior sampler returned the wrong shape");
  const std::size_t dim = static_cast<std::size_t>(x.cols());
  auto row = [&](const SampleMatrix& m, std::size_t i) {
    return std::span<const double>(m.data() + i * dim, dim);
  };

  std::vector<double> log_l(n_s), log_p(n_s);
  parallel_for(n_s, cfg.threads, [&](std::size_t i) {
    log_p[i] = checked(log_prior(row(x, i)), "log_prior");
    log_l[i] = checked(log_likelihood(row(x, i)), "log_likelihood");
  });

  PosteriorEnsemble ens;
  ens.seed = rng.seed();
  ens.stages.push_back({0.0, static_cast<double>(n_s), 1.0, 0.0});

  double beta = 0.0;
  double log_evidence = 0.0;
  std::vector<double> w(n_s);
  std::vector<std::size_t> parent(n_s);
  std::vector<char> accepted(n_s);

  for (int stage = 1; beta < 1.0; ++stage) {
    if (stage > cfg.max_stages)
      throw_numerical("run_tmcmc", "exceeded max_stages=" + std::to_string(cfg.max_stages) +
                                       " at beta=" + std::to_string(beta));
    const double lmax = *std::max_element(log_l.begin(), log_l.end());
    if (!std::isfinite(lmax))
      throw_numerical("run_tmcmc", "degenerate weights: every log-likelihood is -inf or +inf");

    const double remaining = 1.0 - beta;
    const double dbeta = choose_increment(log_l, lmax, remaining, cfg.target_cov);
    const double next_beta = dbeta >= remaining ? 1.0 : beta + dbeta;

    const WeightStats ws = weight_stats(log_l, lmax, dbeta);
    const double log_mean_weight = dbeta * lmax + ws.log_mean;
    log_evidence += log_mean_weight;

    double wsum = 0.0;
    for (std::size_t i = 0; i < n_s; ++i) wsum += (w[i] = std::exp(dbeta * (log_l[i] - lmax)));
    double w2 = 0.0;
    for (auto& v : w) {
      v /= wsum;
      w2 += v * v;
    }
    const double ess = 1.0 / w2;

    const Eigen::MatrixXd chol = proposal_factor(x, w, cfg.scale);

    RandomStream stage_stream = rng.substream(static_cast<std::uint64_t>(stage));
    {
      RandomStream resample = stage_stream.substream(0);
      std::vector<double> cdf(n_s);
      std::partial_sum(w.begin(), w.end(), cdf.begin());
      for (std::size_t i = 0; i < n_s; ++i) {
        const double u = resample.uniform() * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        parent[i] = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), n_s - 1);
      }
    }

    SampleMatrix next(static_cast<Eigen::Index>(n_s), static_cast<Eigen::Index>(dim));
    std::vector<double> next_l(n_s), next_p(n_s);
    parallel_for(n_s, cfg.threads, [&](std::size_t i) {
      RandomStream s = stage_stream.substream(i + 1);
      const std::size_t src = parent[i];
      Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
      for (std::size_t d = 0; d < dim; ++d) z(static_cast<Eigen::Index>(d)) = s.normal();
      const double u = s.uniform();

      Eigen::VectorXd cand = x.row(static_cast<Eigen::Index>(src)).transpose() + chol * z;
      const std::span<const double> cspan(cand.data(), dim);
      const double cand_p = checked(log_prior(cspan), "log_prior");
      bool accept = false;
      double cand_l = kNegInf;
      if (cand_p != kNegInf) {
        cand_l = checked(log_likelihood(cspan), "log_likelihood");
        const double log_ratio =
            (cand_p + next_beta * cand_l) - (log_p[src] + next_beta * log_l[src]);
        accept = std::log(u) < log_ratio;
      }
      if (accept) {
        next.row(static_cast<Eigen::Index>(i)) = cand.transpose();
        next_l[i] = cand_l;
        next_p[i] = cand_p;
      } else {
        next.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(src));
        next_l[i] = log_l[src];
        next_p[i] = log_p[src];
      }
      accepted[i] = accept ? 1 : 0;
    });

    const auto n_acc = static_cast<double>(std::count(accepted.begin(), accepted.end(), 1));
    ens.stages.push_back({next_beta, ess, n_acc / static_cast<double>(n_s), log_mean_weight});
    spdlog::debug("tmcmc stage {}: beta={:.6g} ess={:.1f} acc={:.3f}", stage, next_beta, ess,
                  n_acc / static_cast<double>(n_s));

    x = std::move(next);
    log_l = std::move(next_l);
    log_p = std::move(next_p);
    beta = next_beta;
  }

  ens.samples = std::move(x);
  ens.log_likelihood = std::move(log_l);
  ens.log_evidence = log_evidence;
  return ens;
}

}  // namespace monsel
