#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "monsel/decision.hpp"
#include "monsel/inference.hpp"
#include "monsel/priors.hpp"
#include "monsel/signals.hpp"
#include "monsel/synth_lab.hpp"
#include "monsel/tmcmc.hpp"

namespace monsel {

struct WelchSettings {
  std::size_t segment_length = 0;  // 0: default_segment_length(N)
  double overlap_fraction = 0.5;
  WindowKind window = WindowKind::hann;
};

struct PeakSettings {
  double min_prominence_ratio = 1e-4;
  double min_separation_bins = 2.0;  // in PSD bins
};

struct AdequacySettings {
  double tol_hz = 2.0;
  AdequacyMode mode = AdequacyMode::posterior_mean;
};

/// Everything a pipeline run needs. Relative paths resolve against
/// `base_dir` (the directory of the config file, or the working directory).
struct RunConfig {
  std::string dataset = "dataset.csv";
  double f_max = 100.0;
  double c = 0.05;
  NoiseMode noise_mode = NoiseMode::global_norm;
  std::size_t n_s = 1000;
  TmcmcConfig tmcmc;
  RiskProfile risk;
  AttributeWeights weights;
  std::map<ModelId, double> cost_scores{{ModelId::model1, 1.0}, {ModelId::model2, 2.0}};
  std::map<ModelId, PriorSpec> priors{{ModelId::model1, default_priors(ModelId::model1)},
                                      {ModelId::model2, default_priors(ModelId::model2)}};
  WelchSettings welch;
  PeakSettings peaks;
  AdequacySettings adequacy;
  std::optional<TwinConfig> twin;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  std::string base_dir = ".";

  std::string resolve(const std::string& path) const;
  std::string dataset_path() const { return resolve(dataset); }
  std::string out_path(const std::string& file) const;
  CandidateModel candidate(ModelId id) const;
};

/// Parses a config document. Unknown keys are rejected so typos surface.
RunConfig parse_run_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

/// Throws InputError on any out-of-range value.
void validate(const RunConfig& cfg);

nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace monsel
