#include "monsel/priors.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "monsel/errors.hpp"

namespace monsel {

double MarginalNormal::sd() const { return std::abs(mean) * cov; }

std::vector<std::string> PriorSpec::names() const {
  std::vector<std::string> out;
  out.reserve(marginals.size());
  for (const auto& m : marginals) out.push_back(m.name);
  return out;
}

PriorSpec default_priors(ModelId id) {
  PriorSpec spec;
  spec.model = id;
  spec.marginals = {{"k", 38494.0, 0.066}, {"m", 0.925, 0.053}, {"D", 0.12, 0.10}};
  if (id == ModelId::model2) {
    spec.marginals.push_back({"k_f", 722.0, 0.066});
    spec.marginals.push_back({"m_f", 9.33, 0.10});
    spec.marginals.push_back({"D_f", 0.03, 0.15});
  }
  return spec;
}

void validate(const PriorSpec& spec) {
  const PriorSpec ref = default_priors(spec.model);
  if (spec.dim() != ref.dim())
    throw_input("PriorSpec", to_string(spec.model) + " needs " + std::to_string(ref.dim()) +
                                 " marginals");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const auto& m = spec.marginals[i];
    if (m.name != ref.marginals[i].name)
      throw_input("PriorSpec", "coordinate " + std::to_string(i) + " must be '" +
                                   ref.marginals[i].name + "', got '" + m.name + "'");
    if (!seen.insert(m.name).second) throw_input("PriorSpec", "duplicate coordinate " + m.name);
    if (!(m.cov > 0.0) || !std::isfinite(m.cov) || !(m.mean > 0.0) || !std::isfinite(m.mean))
      throw_input("PriorSpec", "'" + m.name + "' needs mean > 0 and cov > 0");
  }
}

bool in_support(std::span<const double> theta) {
  for (double v : theta)
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  return true;
}

SampleMatrix sample_prior(const PriorSpec& spec, std::size_t n, const RandomStream& rng) {
  validate(spec);
  if (n < 1) throw_input("sample_prior", "n must be >= 1");
  constexpr std::size_t kMaxAttemptsPerRow = 1000;

  const std::size_t dim = spec.dim();
  SampleMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::size_t attempts = 0;
  std::size_t rejected = 0;
  std::vector<double> row(dim);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream stream = rng.substream(i);
    for (std::size_t tries = 0;; ++tries) {
      if (tries == kMaxAttemptsPerRow)
        throw_input("sample_prior", "prior mass below zero is too large; check the prior means");
      ++attempts;
      for (std::size_t d = 0; d < dim; ++d)
        row[d] = spec.marginals[d].mean + spec.marginals[d].sd() * stream.normal();
      if (in_support(row)) break;
      ++rejected;
    }
    for (std::size_t d = 0; d < dim; ++d)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = row[d];
  }
  if (2 * rejected > attempts)
    throw_input("sample_prior", "rejection rate above 50%; the prior is misconfigured");
  return out;
}

double log_prior_pdf(const PriorSpec& spec, std::span<const double> theta) {
  if (theta.size() != spec.dim())
    throw_input("log_prior_pdf", "expected " + std::to_string(spec.dim()) + " coordinates, got " +
                                     std::to_string(theta.size()));
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double lp = 0.0;
  for (std::size_t d = 0; d < theta.size(); ++d) {
    const double sd = spec.marginals[d].sd();
    const double z = (theta[d] - spec.marginals[d].mean) / sd;
    lp += -0.5 * z * z - std::log(sd) - half_log_two_pi;
  }
  return lp;
}

double damping_ratio(double b, double k, double m) { return b / (2.0 * std::sqrt(k * m)); }

ModelParams to_physical(ModelId id, std::span<const double> theta) {
  if (theta.size() != static_cast<std::size_t>(params_dim(id)))
    throw_input("to_physical", "wrong coordinate count for " + to_string(id));
  for (std::size_t d = 0; d < theta.size(); ++d) {
    // Damping ratios may be exactly zero; masses and stiffnesses may not.
    const bool is_damping = d == 2 || d == 5;
    const bool ok = is_damping ? theta[d] >= 0.0 : theta[d] > 0.0;
    if (!ok || !std::isfinite(theta[d]))
      throw_input("to_physical", "coordinate " + std::to_string(d) + " out of range");
  }
  const double k = theta[0], m = theta[1], d = theta[2];
  const double b = 2.0 * d * std::sqrt(k * m);
  if (id == ModelId::model1) return OneMassParams{m, b, k};
  const double kf = theta[3], mf = theta[4], df = theta[5];
  return TwoMassParams{m, b, k, mf, 2.0 * df * std::sqrt(kf * mf), kf};
}

}  // namespace monsel
