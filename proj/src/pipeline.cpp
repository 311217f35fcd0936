#include "monsel/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "monsel/errors.hpp"
#include "monsel/synth_lab.hpp"

namespace monsel {

namespace {

using ojson = nlohmann::ordered_json;

Dataset load_dataset(const RunConfig& cfg) {
  const std::string path = cfg.dataset_path();
  if (!std::filesystem::exists(path))
    throw_input("dataset", "'" + path + "' does not exist; run `generate` or set \"dataset\"");
  return read_dataset(path);
}

std::string ensemble_csv(const RunConfig& cfg, ModelId id) {
  return cfg.out_path("ensemble_" + to_string(id) + ".csv");
}
std::string ensemble_json(const RunConfig& cfg, ModelId id) {
  return cfg.out_path("ensemble_" + to_string(id) + ".json");
}

ojson prior_json(const PriorSpec& prior) {
  ojson j = ojson::object();
  for (const auto& m : prior.marginals) j[m.name] = {{"mean", m.mean}, {"cov", m.cov}};
  return j;
}

/// FNV-1a of the file bytes, hex.
std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

/// True when an on-disk ensemble was produced by the same sampler settings.
bool ensemble_is_current(const RunConfig& cfg, ModelId id) {
  const std::string js = ensemble_json(cfg, id);
  if (!std::filesystem::exists(js) || !std::filesystem::exists(ensemble_csv(cfg, id))) return false;
  std::ifstream in(js);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) return false;
  try {
    const auto& c = j.at("config");
    return j.at("seed").get<std::uint64_t>() == calibration_seed(cfg.seed, id) &&
           j.at("n_s").get<std::size_t>() == cfg.n_s && c.at("c").get<double>() == cfg.c &&
           c.at("noise_mode").get<std::string>() == to_string(cfg.noise_mode) &&
           c.at("target_cov").get<double>() == cfg.tmcmc.target_cov &&
           c.at("scale").get<double>() == cfg.tmcmc.scale &&
           j.value("dataset_fnv1a", std::string()) == file_digest(cfg.dataset_path()) &&
           j.at("prior") == nlohmann::json::parse(prior_json(cfg.priors.at(id)).dump());
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

}  // namespace

ChannelSpectra compute_spectra(const Dataset& data, double f_max) {
  return {fft_magnitude(data.acc_mass, f_max), fft_magnitude(data.acc_frame, f_max),
          fft_magnitude(data.force, f_max)};
}

std::uint64_t calibration_seed(std::uint64_t run_seed, ModelId id) {
  return mix_seed(run_seed, id == ModelId::model1 ? 1 : 2);
}

std::string cmd_generate(const RunConfig& cfg) {
  if (!cfg.twin)
    throw_input("generate", "config has no \"twin\" block; add e.g. \"twin\": {} to use the defaults");
  const TwinConfig& twin = *cfg.twin;
  const Dataset data = simulate_experiment(twin);
  const std::string path = cfg.dataset_path();
  write_dataset(data, path);

  const auto& p = twin.true_params;
  ojson truth;
  truth["true_params"] = {{"k", p.k},   {"m", p.m},     {"D", damping_ratio(p.b, p.k, p.m)},
                          {"b", p.b},   {"k_f", p.k_f}, {"m_f", p.m_f},
                          {"D_f", damping_ratio(p.b_f, p.k_f, p.m_f)}, {"b_f", p.b_f}};
  truth["modal_frequencies_hz"] = modal_frequencies(p);
  truth["fs"] = twin.fs;
  truth["n_samples"] = twin.n_samples;
  truth["pulse"] = {{"peak_force", twin.pulse.peak_force},
                    {"duration", twin.pulse.duration},
                    {"start_time", twin.pulse.start_time}};
  truth["noise_rms"] = {{"acc_mass", twin.noise.acc_mass},
                        {"acc_frame", twin.noise.acc_frame},
                        {"force", twin.noise.force}};
  truth["noise_relative"] = twin.noise.relative;
  truth["seed"] = twin.seed;
  write_file_atomic(path + ".truth.json", truth.dump(2) + "\n");
  spdlog::info("wrote {} ({} samples at {} Hz)", path, twin.n_samples, twin.fs);
  return path;
}

void cmd_spectra(const RunConfig& cfg) {
  const ChannelSpectra s = compute_spectra(load_dataset(cfg), cfg.f_max);
  write_spectrum_csv(cfg.out_path("spectrum_acc_mass.csv"), s.acc_mass.freqs, s.acc_mass.mags);
  write_spectrum_csv(cfg.out_path("spectrum_acc_frame.csv"), s.acc_frame.freqs, s.acc_frame.mags);
  write_spectrum_csv(cfg.out_path("spectrum_force.csv"), s.force.freqs, s.force.mags);
  spdlog::info("wrote spectra with {} bins (0-{} Hz)", s.acc_mass.size(), cfg.f_max);
}

PsdResult analyze_frequency_content(const TimeSeries& acc_mass, const RunConfig& cfg) {
  const std::size_t seg = cfg.welch.segment_length ? cfg.welch.segment_length
                                                   : default_segment_length(acc_mass.size());
  PsdResult r;
  r.psd = welch_psd(acc_mass, seg, cfg.welch.overlap_fraction, cfg.welch.window);
  r.peaks = detect_peaks(r.psd, cfg.peaks.min_prominence_ratio,
                         cfg.peaks.min_separation_bins * r.psd.bin_width());
  return r;
}

namespace {

ojson peaks_json(const std::vector<PeakInfo>& peaks) {
  ojson arr = ojson::array();
  for (const auto& p : peaks)
    arr.push_back({{"freq_hz", p.freq_hz}, {"power", p.power}, {"prominence", p.prominence}});
  return arr;
}

ojson psd_json(const PsdEstimate& psd) {
  return {{"segment_length", psd.segment_length},
          {"overlap_fraction", psd.overlap_fraction},
          {"window", psd.window_name},
          {"bin_width_hz", psd.bin_width()}};
}

}  // namespace

PsdResult cmd_psd(const RunConfig& cfg) {
  const Dataset data = load_dataset(cfg);
  PsdResult r = analyze_frequency_content(data.acc_mass, cfg);
  write_spectrum_csv(cfg.out_path("psd_acc_mass.csv"), r.psd.freqs, r.psd.power);
  ojson j;
  j["psd"] = psd_json(r.psd);
  j["peaks"] = peaks_json(r.peaks);
  write_file_atomic(cfg.out_path("peaks.json"), j.dump(2) + "\n");
  spdlog::info("{} spectral peaks detected", r.peaks.size());
  return r;
}

namespace {

PosteriorEnsemble calibrate_with(const RunConfig& cfg, ModelId id, const ChannelSpectra& spectra) {
  const NoiseModel noise = make_noise_model(spectra.acc_mass, cfg.c, cfg.noise_mode);
  const RandomStream rng(calibration_seed(cfg.seed, id));
  const PriorSpec& prior = cfg.priors.at(id);
  const auto& input = spectra.input_for(id);

  spdlog::info("calibrating {} with n_s={}", to_string(id), cfg.n_s);
  PosteriorEnsemble ens;
  try {
    ens = calibrate_model(id, prior, spectra.acc_mass, input, noise, cfg.n_s, rng, cfg.tmcmc);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " (model " + to_string(id) + ")");
  }
  for (std::size_t s = 0; s < ens.stages.size(); ++s) {
    const auto& st = ens.stages[s];
    spdlog::info("  stage {:2d} beta={:.6f} ess={:7.1f} acceptance={:.3f}", s, st.beta, st.ess,
                 st.acceptance_rate);
  }
  spdlog::info("  log evidence {:.4f}", ens.log_evidence);

  write_ensemble(ens, ensemble_csv(cfg, id), ensemble_json(cfg, id), cfg.tmcmc, cfg.c,
                 cfg.noise_mode, id);
  {
    // Record the inputs the ensemble depends on, for reuse checks.
    std::ifstream in(ensemble_json(cfg, id));
    auto j = ojson::parse(in);
    j["dataset_fnv1a"] = file_digest(cfg.dataset_path());
    j["prior"] = prior_json(prior);
    write_file_atomic(ensemble_json(cfg, id), j.dump(2) + "\n");
  }

  const RandomStream prior_rng = RandomStream(calibration_seed(cfg.seed, id)).substream(0);
  const SampleMatrix prior_draws = sample_prior(prior, cfg.n_s, prior_rng);
  const auto predictor = spectrum_predictor(id, input);
  write_bands_csv(cfg.out_path("bands_prior_" + to_string(id) + ".csv"),
                  posterior_bands(prior_draws, predictor, input.freqs));
  write_bands_csv(cfg.out_path("bands_posterior_" + to_string(id) + ".csv"),
                  posterior_bands(ens.samples, predictor, input.freqs));
  return ens;
}

}  // namespace

PosteriorEnsemble cmd_calibrate(const RunConfig& cfg, ModelId id) {
  validate(cfg);
  const ChannelSpectra spectra = compute_spectra(load_dataset(cfg), cfg.f_max);
  return calibrate_with(cfg, id, spectra);
}

SelectResult cmd_select(const RunConfig& cfg, Qoi qoi) {
  validate(cfg);
  const Dataset data = load_dataset(cfg);
  const ChannelSpectra spectra = compute_spectra(data, cfg.f_max);

  std::vector<PosteriorEnsemble> ensembles;
  std::vector<CandidateModel> models;
  for (ModelId id : kAllModels) {
    models.push_back(cfg.candidate(id));
    if (ensemble_is_current(cfg, id)) {
      spdlog::info("reusing {}", ensemble_csv(cfg, id));
      auto ens = read_ensemble(ensemble_csv(cfg, id), ensemble_json(cfg, id));
      if (ens.dim() != static_cast<std::size_t>(params_dim(id)))
        throw_input("select", ensemble_csv(cfg, id) + " has the wrong number of columns");
      ensembles.push_back(std::move(ens));
    } else {
      ensembles.push_back(calibrate_with(cfg, id, spectra));
    }
  }

  ojson rep;
  rep["qoi"] = to_string(qoi);
  rep["seed"] = cfg.seed;
  rep["weights"] = {{"w_precision", cfg.weights.w_precision}, {"w_cost", cfg.weights.w_cost}};

  std::vector<double> utility(models.size()), mean_nrmse(models.size(), 0.0);
  ojson per_model = ojson::array();
  if (qoi == Qoi::response_amplitude) {
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < models.size(); ++i)
      cands.push_back({models[i], &ensembles[i], &spectra.input_for(models[i].id)});
    const DecisionReport dr = select_model(cands, spectra.acc_mass, cfg.risk, cfg.weights);
    rep["chosen"] = to_string(dr.chosen);
    rep["risk_profile"] = {{"kind", to_string(cfg.risk.kind)}, {"gamma", cfg.risk.gamma}};
    rep["n_s"] = cfg.n_s;
    rep["c"] = cfg.c;
    rep["noise_mode"] = to_string(cfg.noise_mode);
    for (std::size_t i = 0; i < models.size(); ++i) {
      const ModelScore& s = dr.per_model.at(models[i].id);
      per_model.push_back({{"model", to_string(models[i].id)},
                           {"expected_utility", s.expected_utility},
                           {"mean_nrmse", s.mean_nrmse},
                           {"cost_score", s.cost_score},
                           {"cost_utility", s.cost_utility},
                           {"combined", s.combined},
                           {"log_evidence", ensembles[i].log_evidence}});
    }
  } else {
    const PsdResult fc = analyze_frequency_content(data.acc_mass, cfg);
    std::vector<Adequacy> adequacy;
    for (std::size_t i = 0; i < models.size(); ++i) {
      adequacy.push_back(frequency_adequacy(models[i].id, ensembles[i], fc.peaks,
                                            cfg.adequacy.tol_hz, cfg.adequacy.mode));
      utility[i] = adequacy.back().adequate ? 1.0 : 0.0;
    }
    const DecisionReport dr = select_from_scores(models, utility, mean_nrmse, cfg.weights);
    rep["chosen"] = to_string(dr.chosen);
    rep["psd"] = psd_json(fc.psd);
    rep["peaks"] = peaks_json(fc.peaks);
    rep["tol_hz"] = cfg.adequacy.tol_hz;
    rep["adequacy_mode"] = to_string(cfg.adequacy.mode);
    for (std::size_t i = 0; i < models.size(); ++i) {
      const ModelScore& s = dr.per_model.at(models[i].id);
      const Adequacy& a = adequacy[i];
      ojson m = {{"model", to_string(models[i].id)},
                 {"matched", a.matched},
                 {"required", a.required},
                 {"adequate", a.adequate},
                 {"modal_hz", a.modal_hz},
                 {"adequacy_utility", s.expected_utility},
                 {"cost_score", s.cost_score},
                 {"cost_utility", s.cost_utility},
                 {"combined", s.combined}};
      if (cfg.adequacy.mode == AdequacyMode::sample_fraction)
        m["fraction_adequate"] = a.fraction_adequate;
      per_model.push_back(std::move(m));
    }
  }
  rep["models"] = std::move(per_model);

  const auto problems = check_report_schema(rep);
  if (!problems.empty()) throw_numerical("select", "report failed schema check: " + problems.front());
  write_file_atomic(cfg.out_path("report_" + to_string(qoi) + ".json"), rep.dump(2) + "\n");
  return {rep, format_report_table(rep)};
}

std::string format_report_table(const nlohmann::ordered_json& rep) {
  std::string out;
  const std::string qoi = rep.at("qoi").get<std::string>();
  out += fmt::format("qoi: {}\n", qoi);
  if (qoi == "response_amplitude") {
    out += fmt::format("{:<8} {:>10} {:>10} {:>6} {:>10} {:>10}\n", "model", "E[U]", "mean_nRMSE",
                       "cost", "cost_U", "combined");
    for (const auto& m : rep.at("models"))
      out += fmt::format("{:<8} {:>10.4f} {:>10.4f} {:>6.2f} {:>10.4f} {:>10.4f}\n",
                         m.at("model").get<std::string>(), m.at("expected_utility").get<double>(),
                         m.at("mean_nrmse").get<double>(), m.at("cost_score").get<double>(),
                         m.at("cost_utility").get<double>(), m.at("combined").get<double>());
  } else {
    std::string peaks;
    for (const auto& p : rep.at("peaks"))
      peaks += fmt::format("{}{:.2f}", peaks.empty() ? "" : ", ", p.at("freq_hz").get<double>());
    out += fmt::format("detected peaks [Hz]: {}\n", peaks.empty() ? "none" : peaks);
    out += fmt::format("{:<8} {:>8} {:>9} {:>20} {:>6} {:>10}\n", "model", "matched", "adequate",
                       "modal_hz", "cost", "combined");
    for (const auto& m : rep.at("models")) {
      std::string modes;
      for (const auto& f : m.at("modal_hz"))
        modes += fmt::format("{}{:.2f}", modes.empty() ? "" : ", ", f.get<double>());
      out += fmt::format("{:<8} {:>4}/{:<3} {:>9} {:>20} {:>6.2f} {:>10.4f}\n",
                         m.at("model").get<std::string>(), m.at("matched").get<int>(),
                         m.at("required").get<int>(), m.at("adequate").get<bool>() ? "yes" : "no",
                         modes, m.at("cost_score").get<double>(), m.at("combined").get<double>());
    }
  }
  out += fmt::format("chosen: {}\n", rep.at("chosen").get<std::string>());
  return out;
}

std::string cmd_report(const RunConfig& cfg, Qoi qoi) {
  const std::string path = cfg.out_path("report_" + to_string(qoi) + ".json");
  std::ifstream in(path);
  if (!in) throw_input("report", "'" + path + "' not found; run `select` first");
  const auto rep = ojson::parse(in, nullptr, false);
  if (rep.is_discarded()) throw_input("report", "'" + path + "' is not valid JSON");
  const auto problems = check_report_schema(rep);
  if (!problems.empty()) throw_input("report", "'" + path + "': " + problems.front());
  return format_report_table(rep);
}

std::vector<std::string> check_report_schema(const nlohmann::json& rep) {
  std::vector<std::string> bad;
  auto need = [&](const nlohmann::json& obj, const char* key, auto pred, const char* what) {
    if (!obj.is_object() || !obj.contains(key) || !pred(obj.at(key)))
      bad.push_back(std::string("'") + key + "' must be " + what);
  };
  const auto is_num = [](const nlohmann::json& v) { return v.is_number(); };
  const auto is_str = [](const nlohmann::json& v) { return v.is_string(); };
  const auto is_unit = [](const nlohmann::json& v) {
    return v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0;
  };
  const auto is_model = [](const nlohmann::json& v) {
    return v.is_string() && (v == "model1" || v == "model2");
  };

  if (!rep.is_object()) return {"report must be an object"};
  need(rep, "qoi", [](const nlohmann::json& v) {
    return v == "response_amplitude" || v == "frequency_content";
  }, "response_amplitude or frequency_content");
  need(rep, "chosen", is_model, "model1 or model2");
  need(rep, "seed", [](const nlohmann::json& v) { return v.is_number_unsigned(); }, "an unsigned integer");
  need(rep, "weights", [](const nlohmann::json& v) { return v.is_object(); }, "an object");
  if (rep.contains("weights") && rep["weights"].is_object()) {
    need(rep["weights"], "w_precision", is_unit, "in [0,1]");
    need(rep["weights"], "w_cost", is_unit, "in [0,1]");
  }
  need(rep, "models", [](const nlohmann::json& v) { return v.is_array() && v.size() >= 2; },
       "an array of at least two entries");
  if (!bad.empty()) return bad;

  const bool amplitude = rep["qoi"] == "response_amplitude";
  if (amplitude) {
    need(rep, "risk_profile", [](const nlohmann::json& v) { return v.is_object(); }, "an object");
    need(rep, "n_s", [](const nlohmann::json& v) { return v.is_number_unsigned(); }, "an unsigned integer");
    need(rep, "c", is_num, "a number");
    need(rep, "noise_mode", is_str, "a string");
  } else {
    need(rep, "peaks", [](const nlohmann::json& v) { return v.is_array(); }, "an array");
    need(rep, "psd", [](const nlohmann::json& v) { return v.is_object(); }, "an object");
    need(rep, "tol_hz", is_num, "a number");
    need(rep, "adequacy_mode", is_str, "a string");
  }
  double best = -1e300;
  for (const auto& m : rep["models"]) {
    need(m, "model", is_model, "model1 or model2");
    need(m, "cost_score", is_num, "a number");
    need(m, "cost_utility", is_unit, "in [0,1]");
    need(m, "combined", is_unit, "in [0,1]");
    if (amplitude) {
      need(m, "expected_utility", is_unit, "in [0,1]");
      need(m, "mean_nrmse", is_num, "a number");
      need(m, "log_evidence", is_num, "a number");
    } else {
      need(m, "matched", [](const nlohmann::json& v) { return v.is_number_integer(); }, "an integer");
      need(m, "required", [](const nlohmann::json& v) { return v.is_number_integer(); }, "an integer");
      need(m, "adequate", [](const nlohmann::json& v) { return v.is_boolean(); }, "a boolean");
      need(m, "modal_hz", [](const nlohmann::json& v) { return v.is_array(); }, "an array");
    }
    if (m.contains("combined") && m["combined"].is_number())
      best = std::max(best, m["combined"].get<double>());
  }
  if (bad.empty()) {
    for (const auto& m : rep["models"])
      if (m["model"] == rep["chosen"] && m["combined"].get<double>() < best)
        bad.push_back("'chosen' does not attain the maximum combined score");
  }
  return bad;
}

}  // namespace monsel
