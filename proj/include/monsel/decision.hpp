#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "monsel/oscillators.hpp"
#include "monsel/signals.hpp"
#include "monsel/tmcmc.hpp"

namespace monsel {

enum class RiskKind { neutral, averse, seeking };

struct RiskProfile {
  RiskKind kind = RiskKind::neutral;
  double gamma = 2.0;  // shape; ignored when neutral
};

struct AttributeWeights {
  double w_precision = 1.0;
  double w_cost = 0.0;
};

enum class Qoi { response_amplitude, frequency_content };

RiskKind parse_risk_kind(const std::string& s);
std::string to_string(RiskKind k);
Qoi parse_qoi(const std::string& s);
std::string to_string(Qoi q);

void validate(const RiskProfile& p);
void validate(const AttributeWeights& w);

/// sqrt(sum (pred - obs)^2 / sum obs^2). Grids must match.
double nrmse(const MagnitudeSpectrum& predicted, const MagnitudeSpectrum& observed);
double nrmse(std::span<const double> predicted, std::span<const double> observed);

/// Utility of the precision attribute, with x clamped to [0, 1]:
///   neutral  1 - x
///   averse   (1 - x)^(1/gamma)
///   seeking  (1 - x)^gamma
double utility_precision(double x, const RiskProfile& profile);

/// Posterior mean of utility_precision(nrmse(prediction, observed)) over the
/// ensemble rows.
double expected_utility(const PosteriorEnsemble& ensemble, ModelId id,
                        const MagnitudeSpectrum& observed, const MagnitudeSpectrum& input_spec,
                        const RiskProfile& profile);

/// 1 - cost_score / max_cost.
double cost_utility(double cost_score, double max_cost);

struct ModelScore {
  double expected_utility = 0.0;
  double cost_utility = 0.0;
  double combined = 0.0;
  double mean_nrmse = 0.0;
  double cost_score = 0.0;
};

struct DecisionReport {
  Qoi qoi = Qoi::response_amplitude;
  std::map<ModelId, ModelScore> per_model;
  ModelId chosen = ModelId::model1;
};

struct Candidate {
  CandidateModel model;
  const PosteriorEnsemble* ensemble = nullptr;
  /// Input spectrum the model is driven by (frame acceleration or force).
  const MagnitudeSpectrum* input_spec = nullptr;
};

/// Index of the maximal score. Exact ties go to the lower cost, then to the
/// earlier position.
std::size_t argmax_with_tiebreak(std::span<const double> scores, std::span<const double> costs);

/// combined_i = w_precision * EU_i + w_cost * CU_i, CU_i = cost_utility(cost_i,
/// max cost over candidates); the report names the argmax.
DecisionReport select_model(const std::vector<Candidate>& candidates,
                            const MagnitudeSpectrum& observed, const RiskProfile& profile,
                            const AttributeWeights& weights);

/// select_model when the expected utilities are already known.
DecisionReport select_from_scores(const std::vector<CandidateModel>& models,
                                  std::span<const double> expected_utilities,
                                  std::span<const double> mean_nrmse,
                                  const AttributeWeights& weights);

enum class AdequacyMode { posterior_mean, sample_fraction };

AdequacyMode parse_adequacy_mode(const std::string& s);
std::string to_string(AdequacyMode m);

struct Adequacy {
  int matched = 0;
  int required = 0;
  bool adequate = false;
  double fraction_adequate = 0.0;  // sample_fraction mode only
  std::vector<double> modal_hz;
};

/// Matches detected peaks one-to-one to the model's modal frequencies
/// (closest pairs first); a pair counts when within tol_hz. Adequate when
/// every peak is matched.
Adequacy frequency_adequacy(const ModelParams& params, std::span<const PeakInfo> peaks,
                            double tol_hz);

/// Ensemble form: posterior_mean evaluates at the mean coordinates;
/// sample_fraction requires at least 95% of rows to be adequate.
Adequacy frequency_adequacy(ModelId id, const PosteriorEnsemble& ensemble,
                            std::span<const PeakInfo> peaks, double tol_hz,
                            AdequacyMode mode = AdequacyMode::posterior_mean);

}  // namespace monsel
