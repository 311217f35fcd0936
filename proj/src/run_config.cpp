#include "monsel/run_config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>

#include "monsel/errors.hpp"

namespace monsel {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw_input("config", "'" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw_input("config", "unknown key '" + key + "' in '" + where + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw_input("config", "'" + where + "." + key + "' has the wrong type");
  }
}

void read_prior(const json& obj, PriorSpec& spec, const std::string& where) {
  std::vector<std::string> names = spec.names();
  for (const auto& [key, value] : obj.items()) {
    auto it = std::find(names.begin(), names.end(), key);
    if (it == names.end()) throw_input("config", "unknown coordinate '" + key + "' in '" + where + "'");
    auto& m = spec.marginals[static_cast<std::size_t>(it - names.begin())];
    check_keys(value, where + "." + key, {"mean", "cov"});
    read(value, "mean", m.mean, where + "." + key);
    read(value, "cov", m.cov, where + "." + key);
  }
}

TwinConfig read_twin(const json& obj, std::uint64_t run_seed) {
  check_keys(obj, "twin", {"true_params", "fs", "n_samples", "pulse", "noise_rms", "noise_relative", "seed"});
  TwinConfig t;
  t.seed = run_seed;
  if (obj.contains("true_params")) {
    const auto& tp = obj.at("true_params");
    check_keys(tp, "twin.true_params", {"k", "m", "D", "k_f", "m_f", "D_f"});
    // Coordinates as in the priors: stiffness, mass, damping ratio.
    double k = t.true_params.k, m = t.true_params.m, d = damping_ratio(t.true_params.b, k, m);
    double kf = t.true_params.k_f, mf = t.true_params.m_f,
           df = damping_ratio(t.true_params.b_f, kf, mf);
    read(tp, "k", k, "twin.true_params");
    read(tp, "m", m, "twin.true_params");
    read(tp, "D", d, "twin.true_params");
    read(tp, "k_f", kf, "twin.true_params");
    read(tp, "m_f", mf, "twin.true_params");
    read(tp, "D_f", df, "twin.true_params");
    const double theta[] = {k, m, d, kf, mf, df};
    t.true_params = std::get<TwoMassParams>(to_physical(ModelId::model2, theta));
  }
  read(obj, "fs", t.fs, "twin");
  read(obj, "n_samples", t.n_samples, "twin");
  if (obj.contains("pulse")) {
    const auto& p = obj.at("pulse");
    check_keys(p, "twin.pulse", {"peak_force", "duration", "start_time"});
    read(p, "peak_force", t.pulse.peak_force, "twin.pulse");
    read(p, "duration", t.pulse.duration, "twin.pulse");
    read(p, "start_time", t.pulse.start_time, "twin.pulse");
  }
  if (obj.contains("noise_rms")) {
    const auto& n = obj.at("noise_rms");
    check_keys(n, "twin.noise_rms", {"acc_mass", "acc_frame", "force"});
    read(n, "acc_mass", t.noise.acc_mass, "twin.noise_rms");
    read(n, "acc_frame", t.noise.acc_frame, "twin.noise_rms");
    read(n, "force", t.noise.force, "twin.noise_rms");
  }
  read(obj, "noise_relative", t.noise.relative, "twin");
  read(obj, "seed", t.seed, "twin");
  return t;
}

}  // namespace

std::string RunConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string RunConfig::out_path(const std::string& file) const {
  return (std::filesystem::path(resolve(out_dir)) / file).string();
}

CandidateModel RunConfig::candidate(ModelId id) const {
  CandidateModel c = default_candidate(id);
  if (auto it = cost_scores.find(id); it != cost_scores.end()) c.cost_score = it->second;
  return c;
}

RunConfig parse_run_config(const json& j, const std::string& base_dir) {
  check_keys(j, "config",
             {"dataset", "f_max", "c", "noise_mode", "n_s", "tmcmc", "risk_profile", "weights",
              "cost_scores", "priors", "welch", "peaks", "adequacy", "twin", "seed", "out"});
  RunConfig cfg;
  cfg.base_dir = base_dir;
  read(j, "dataset", cfg.dataset, "config");
  read(j, "f_max", cfg.f_max, "config");
  read(j, "c", cfg.c, "config");
  if (j.contains("noise_mode")) cfg.noise_mode = parse_noise_mode(j.at("noise_mode").get<std::string>());
  read(j, "n_s", cfg.n_s, "config");
  read(j, "seed", cfg.seed, "config");
  read(j, "out", cfg.out_dir, "config");

  if (j.contains("tmcmc")) {
    const auto& t = j.at("tmcmc");
    check_keys(t, "tmcmc", {"target_cov", "scale", "max_stages", "threads"});
    read(t, "target_cov", cfg.tmcmc.target_cov, "tmcmc");
    read(t, "scale", cfg.tmcmc.scale, "tmcmc");
    read(t, "max_stages", cfg.tmcmc.max_stages, "tmcmc");
    read(t, "threads", cfg.tmcmc.threads, "tmcmc");
  }
  if (j.contains("risk_profile")) {
    const auto& r = j.at("risk_profile");
    check_keys(r, "risk_profile", {"kind", "gamma"});
    if (r.contains("kind")) cfg.risk.kind = parse_risk_kind(r.at("kind").get<std::string>());
    read(r, "gamma", cfg.risk.gamma, "risk_profile");
  }
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    check_keys(w, "weights", {"w_precision", "w_cost"});
    const bool has_p = w.contains("w_precision"), has_c = w.contains("w_cost");
    read(w, "w_precision", cfg.weights.w_precision, "weights");
    read(w, "w_cost", cfg.weights.w_cost, "weights");
    if (has_p && !has_c) cfg.weights.w_cost = 1.0 - cfg.weights.w_precision;
    if (has_c && !has_p) cfg.weights.w_precision = 1.0 - cfg.weights.w_cost;
  }
  if (j.contains("cost_scores")) {
    const auto& c = j.at("cost_scores");
    check_keys(c, "cost_scores", {"model1", "model2"});
    for (ModelId id : kAllModels) read(c, to_string(id).c_str(), cfg.cost_scores[id], "cost_scores");
  }
  if (j.contains("priors")) {
    const auto& p = j.at("priors");
    check_keys(p, "priors", {"model1", "model2"});
    for (ModelId id : kAllModels)
      if (p.contains(to_string(id)))
        read_prior(p.at(to_string(id)), cfg.priors[id], "priors." + to_string(id));
  }
  if (j.contains("welch")) {
    const auto& w = j.at("welch");
    check_keys(w, "welch", {"segment_length", "overlap_fraction", "window"});
    read(w, "segment_length", cfg.welch.segment_length, "welch");
    read(w, "overlap_fraction", cfg.welch.overlap_fraction, "welch");
    if (w.contains("window")) cfg.welch.window = parse_window(w.at("window").get<std::string>());
  }
  if (j.contains("peaks")) {
    const auto& p = j.at("peaks");
    check_keys(p, "peaks", {"min_prominence_ratio", "min_separation_bins"});
    read(p, "min_prominence_ratio", cfg.peaks.min_prominence_ratio, "peaks");
    read(p, "min_separation_bins", cfg.peaks.min_separation_bins, "peaks");
  }
  if (j.contains("adequacy")) {
    const auto& a = j.at("adequacy");
    check_keys(a, "adequacy", {"tol_hz", "mode"});
    read(a, "tol_hz", cfg.adequacy.tol_hz, "adequacy");
    if (a.contains("mode")) cfg.adequacy.mode = parse_adequacy_mode(a.at("mode").get<std::string>());
  }
  if (j.contains("twin") && !j.at("twin").is_null()) cfg.twin = read_twin(j.at("twin"), cfg.seed);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_input("load_run_config", "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw_input("load_run_config", "'" + path + "' is not valid JSON: " + e.what());
  }
  auto dir = std::filesystem::path(path).parent_path();
  return parse_run_config(j, dir.empty() ? "." : dir.string());
}

void validate(const RunConfig& cfg) {
  if (!(cfg.f_max > 0.0)) throw_input("config", "f_max must be > 0");
  if (!(cfg.c > 0.0)) throw_input("config", "c must be > 0");
  if (cfg.n_s < 100) throw_input("config", "n_s must be >= 100");
  validate(cfg.tmcmc);
  validate(cfg.risk);
  validate(cfg.weights);
  for (const auto& [id, cost] : cfg.cost_scores)
    if (!(cost >= 0.0)) throw_input("config", "cost_scores." + to_string(id) + " must be >= 0");
  for (const auto& [id, prior] : cfg.priors) validate(prior);
  if (!(cfg.welch.overlap_fraction >= 0.0 && cfg.welch.overlap_fraction < 1.0))
    throw_input("config", "welch.overlap_fraction must lie in [0, 1)");
  if (!(cfg.peaks.min_prominence_ratio > 0.0 && cfg.peaks.min_prominence_ratio <= 1.0))
    throw_input("config", "peaks.min_prominence_ratio must lie in (0, 1]");
  if (!(cfg.peaks.min_separation_bins >= 0.0))
    throw_input("config", "peaks.min_separation_bins must be >= 0");
  if (!(cfg.adequacy.tol_hz > 0.0)) throw_input("config", "adequacy.tol_hz must be > 0");
  if (cfg.twin) validate(*cfg.twin);
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["dataset"] = cfg.dataset;
  j["f_max"] = cfg.f_max;
  j["c"] = cfg.c;
  j["noise_mode"] = to_string(cfg.noise_mode);
  j["n_s"] = cfg.n_s;
  j["tmcmc"] = {{"target_cov", cfg.tmcmc.target_cov},
                {"scale", cfg.tmcmc.scale},
                {"max_stages", cfg.tmcmc.max_stages}};
  j["risk_profile"] = {{"kind", to_string(cfg.risk.kind)}, {"gamma", cfg.risk.gamma}};
  j["weights"] = {{"w_precision", cfg.weights.w_precision}, {"w_cost", cfg.weights.w_cost}};
  for (const auto& [id, cost] : cfg.cost_scores) j["cost_scores"][to_string(id)] = cost;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace monsel
