#include "monsel/decision.hpp"

#include <algorithm>
#include <cmath>

#include "monsel/errors.hpp"
#include "monsel/priors.hpp"

namespace monsel {

RiskKind parse_risk_kind(const std::string& s) {
  if (s == "neutral") return RiskKind::neutral;
  if (s == "averse") return RiskKind::averse;
  if (s == "seeking") return RiskKind::seeking;
  throw_input("parse_risk_kind", "unknown risk profile '" + s + "'");
}

std::string to_string(RiskKind k) {
  switch (k) {
    case RiskKind::neutral: return "neutral";
    case RiskKind::averse: return "averse";
    case RiskKind::seeking: return "seeking";
  }
  return "?";
}

Qoi parse_qoi(const std::string& s) {
  if (s == "response_amplitude") return Qoi::response_amplitude;
  if (s == "frequency_content") return Qoi::frequency_content;
  throw_input("parse_qoi", "unknown qoi '" + s + "' (expected response_amplitude or frequency_content)");
}

std::string to_string(Qoi q) {
  return q == Qoi::response_amplitude ? "response_amplitude" : "frequency_content";
}

void validate(const RiskProfile& p) {
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw_input("RiskProfile", "gamma must be > 0");
}

void validate(const AttributeWeights& w) {
  const bool in_range = w.w_precision >= 0.0 && w.w_precision <= 1.0 && w.w_cost >= 0.0 &&
                        w.w_cost <= 1.0;
  if (!in_range || std::abs(w.w_precision + w.w_cost - 1.0) > 1e-12)
    throw_input("AttributeWeights", "weights must lie in [0, 1] and sum to 1");
}

double nrmse(std::span<const double> predicted, std::span<const double> observed) {
  if (predicted.size() != observed.size()) throw_input("nrmse", "length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    const double d = predicted[j] - observed[j];
    num += d * d;
    den += observed[j] * observed[j];
  }
  if (!(den > 0.0)) throw_input("nrmse", "observed spectrum is identically zero");
  return std::sqrt(num / den);
}

double nrmse(const MagnitudeSpectrum& predicted, const MagnitudeSpectrum& observed) {
  if (predicted.freqs != observed.freqs) throw_input("nrmse", "grid mismatch");
  return nrmse(predicted.mags, observed.mags);
}

double utility_precision(double x, const RiskProfile& profile) {
  if (!(x >= 0.0)) throw_input("utility_precision", "nRMSE must be >= 0");
  const double u = 1.0 - std::min(x, 1.0);
  switch (profile.kind) {
    case RiskKind::neutral: return u;
    case RiskKind::averse: return std::pow(u, 1.0 / profile.gamma);
    case RiskKind::seeking: return std::pow(u, profile.gamma);
  }
  return u;
}

namespace {

struct UtilityStats {
  double eu = 0.0;
  double mean_nrmse = 0.0;
};

UtilityStats utility_stats(const PosteriorEnsemble& ensemble, ModelId id,
                           const MagnitudeSpectrum& observed, const MagnitudeSpectrum& input_spec,
                           const RiskProfile& profile) {
  validate(profile);
  if (ensemble.size() == 0) throw_input("expected_utility", "empty ensemble");
  if (input_spec.freqs != observed.freqs) throw_input("expected_utility", "grid mismatch");
  double su = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const MagnitudeSpectrum pred = predict(to_physical(id, ensemble.row(i)), input_spec);
    const double x = nrmse(pred.mags, observed.mags);
    su += utility_precision(x, profile);
    sx += x;
  }
  const auto n = static_cast<double>(ensemble.size());
  return {su / n, sx / n};
}

}  // namespace

double expected_utility(const PosteriorEnsemble& ensemble, ModelId id,
                        const MagnitudeSpectrum& observed, const MagnitudeSpectrum& input_spec,
                        const RiskProfile& profile) {
  return utility_stats(ensemble, id, observed, input_spec, profile).eu;
}

double cost_utility(double cost_score, double max_cost) {
  if (!(max_cost > 0.0)) throw_input("cost_utility", "max_cost must be > 0");
  if (!(cost_score >= 0.0) || cost_score > max_cost)
    throw_input("cost_utility", "cost_score must lie in [0, max_cost]");
  return 1.0 - cost_score / max_cost;
}

std::size_t argmax_with_tiebreak(std::span<const double> scores, std::span<const double> costs) {
  if (scores.empty() || scores.size() != costs.size())
    throw_input("argmax_with_tiebreak", "need matching nonempty scores and costs");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] || (scores[i] == scores[best] && costs[i] < costs[best]))
      best = i;
  }
  return best;
}

DecisionReport select_from_scores(const std::vector<CandidateModel>& models,
                                  std::span<const double> expected_utilities,
                                  std::span<const double> mean_nrmse,
                                  const AttributeWeights& weights) {
  validate(weights);
  if (models.size() < 2) throw_input("select_model", "need at least two candidates");
  if (expected_utilities.size() != models.size() || mean_nrmse.size() != models.size())
    throw_input("select_model", "score count mismatch");

  double max_cost = 0.0;
  for (const auto& m : models) max_cost = std::max(max_cost, m.cost_score);
  if (!(max_cost > 0.0)) throw_input("select_model", "at least one cost_score must be positive");

  DecisionReport rep;
  std::vector<double> combined(models.size()), costs(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    ModelScore s;
    s.expected_utility = expected_utilities[i];
    s.mean_nrmse = mean_nrmse[i];
    s.cost_score = models[i].cost_score;
    s.cost_utility = cost_utility(models[i].cost_score, max_cost);
    s.combined = weights.w_precision * s.expected_utility + weights.w_cost * s.cost_utility;
    combined[i] = s.combined;
    costs[i] = s.cost_score;
    rep.per_model[models[i].id] = s;
  }
  rep.chosen = models[argmax_with_tiebreak(combined, costs)].id;
  return rep;
}

DecisionReport select_model(const std::vector<Candidate>& candidates,
                            const MagnitudeSpectrum& observed, const RiskProfile& profile,
                            const AttributeWeights& weights) {
  std::vector<CandidateModel> models;
  std::vector<double> eu, nr;
  for (const auto& c : candidates) {
    if (c.ensemble == nullptr || c.input_spec == nullptr)
      throw_input("select_model", "candidate " + to_string(c.model.id) + " is incomplete");
    const auto st = utility_stats(*c.ensemble, c.model.id, observed, *c.input_spec, profile);
    models.push_back(c.model);
    eu.push_back(st.eu);
    nr.push_back(st.mean_nrmse);
  }
  return select_from_scores(models, eu, nr, weights);
}

AdequacyMode parse_adequacy_mode(const std::string& s) {
  if (s == "posterior_mean") return AdequacyMode::posterior_mean;
  if (s == "sample_fraction") return AdequacyMode::sample_fraction;
  throw_input("parse_adequacy_mode", "unknown adequacy mode '" + s + "'");
}

std::string to_string(AdequacyMode m) {
  return m == AdequacyMode::posterior_mean ? "posterior_mean" : "sample_fraction";
}

Adequacy frequency_adequacy(const ModelParams& params, std::span<const PeakInfo> peaks,
                            double tol_hz) {
  if (!(tol_hz > 0.0)) throw_input("frequency_adequacy", "tol_hz must be > 0");
  Adequacy out;
  out.modal_hz = modal_frequencies(params);
  out.required = static_cast<int>(peaks.size());

  struct Pair {
    double dist;
    std::size_t peak, mode;
  };
  std::vector<Pair> pairs;
  for (std::size_t p = 0; p < peaks.size(); ++p)
    for (std::size_t m = 0; m < out.modal_hz.size(); ++m) {
      const double d = std::abs(peaks[p].freq_hz - out.modal_hz[m]);
      if (d <= tol_hz) pairs.push_back({d, p, m});
    }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
  std::vector<char> peak_used(peaks.size(), 0), mode_used(out.modal_hz.size(), 0);
  for (const auto& pr : pairs) {
    if (peak_used[pr.peak] || mode_used[pr.mode]) continue;
    peak_used[pr.peak] = mode_used[pr.mode] = 1;
    ++out.matched;
  }
  out.adequate = out.matched == out.required;
  return out;
}

Adequacy frequency_adequacy(ModelId id, const PosteriorEnsemble& ensemble,
                            std::span<const PeakInfo> peaks, double tol_hz, AdequacyMode mode) {
  if (ensemble.size() == 0) throw_input("frequency_adequacy", "empty ensemble");
  const Eigen::VectorXd mean = ensemble.samples.colwise().mean().transpose();
  Adequacy at_mean =
      frequency_adequacy(to_physical(id, std::span<const double>(mean.data(), mean.size())), peaks,
                         tol_hz);
  if (mode == AdequacyMode::posterior_mean) return at_mean;

  std::size_t ok = 0;
  for (std::size_t i = 0; i < ensemble.size(); ++i)
    if (frequency_adequacy(to_physical(id, ensemble.row(i)), peaks, tol_hz).adequate) ++ok;
  at_mean.fraction_adequate = static_cast<double>(ok) / static_cast<double>(ensemble.size());
  at_mean.adequate = at_mean.fraction_adequate >= 0.95;
  return at_mean;
}

}  // namespace monsel
