// monsel: model selection for a monitored two-mass rig.
//
//   monsel <generate|spectra|psd|calibrate|select|report> [--config FILE]
//          [--seed N] [--model model1|model2] [--qoi QOI] [--out DIR]
//
// Exit codes: 0 success, 2 configuration/input error, 3 numerical failure.
// MONSEL_LOG=trace|debug|info|warn|error|off sets log verbosity.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "monsel/errors.hpp"
#include "monsel/pipeline.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("monsel");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("MONSEL_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour exact names.
    if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
  }
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string model = "model1";
  std::string qoi = "response_amplitude";
  std::optional<std::string> out;
  std::optional<std::string> dataset;
  std::optional<std::size_t> n_s;
  std::optional<double> f_max;
  std::optional<double> c;
  std::optional<std::string> noise_mode;
  std::optional<double> w_precision;
  std::optional<unsigned> threads;
};

monsel::RunConfig build_config(const Flags& f) {
  monsel::RunConfig cfg = f.config.empty() ? monsel::parse_run_config(nlohmann::json::object())
                                           : monsel::load_run_config(f.config);
  if (f.seed) {
    cfg.seed = *f.seed;
    if (cfg.twin) cfg.twin->seed = *f.seed;
  }
  // Flags given on the command line resolve against the working directory.
  if (f.out) cfg.out_dir = std::filesystem::absolute(*f.out).string();
  if (f.dataset) cfg.dataset = std::filesystem::absolute(*f.dataset).string();
  if (f.n_s) cfg.n_s = *f.n_s;
  if (f.f_max) cfg.f_max = *f.f_max;
  if (f.c) cfg.c = *f.c;
  if (f.noise_mode) cfg.noise_mode = monsel::parse_noise_mode(*f.noise_mode);
  if (f.w_precision) {
    cfg.weights.w_precision = *f.w_precision;
    cfg.weights.w_cost = 1.0 - *f.w_precision;
  }
  if (f.threads) cfg.tmcmc.threads = *f.threads;
  monsel::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian decision-theoretic selection between oscillator models"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Run config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--dataset", flags.dataset, "Dataset CSV path");
    sub->add_option("--f-max", flags.f_max, "Upper analysis frequency [Hz]");
  };
  auto add_inference = [&](CLI::App* sub) {
    sub->add_option("--n-s", flags.n_s, "Posterior sample count");
    sub->add_option("--c", flags.c, "Prediction-error coefficient of variation");
    sub->add_option("--noise-mode", flags.noise_mode, "global_norm or per_bin");
    sub->add_option("--threads", flags.threads, "Likelihood worker threads");
  };

  auto* gen = app.add_subcommand("generate", "Simulate the twin rig and write a dataset");
  add_common(gen);
  auto* spec = app.add_subcommand("spectra", "Write band-limited FFT magnitude spectra");
  add_common(spec);
  auto* psd = app.add_subcommand("psd", "Welch PSD of the mass acceleration and its peaks");
  add_common(psd);
  auto* cal = app.add_subcommand("calibrate", "TMCMC calibration of one model");
  add_common(cal);
  add_inference(cal);
  cal->add_option("--model", flags.model, "model1 or model2")
      ->check(CLI::IsMember({"model1", "model2"}));
  auto* sel = app.add_subcommand("select", "Expected-utility model selection");
  add_common(sel);
  add_inference(sel);
  sel->add_option("--qoi", flags.qoi, "response_amplitude or frequency_content")
      ->check(CLI::IsMember({"response_amplitude", "frequency_content"}));
  sel->add_option("--w-precision", flags.w_precision, "Precision weight (cost weight = 1 - w)");
  auto* rep = app.add_subcommand("report", "Print a previously written report");
  add_common(rep);
  rep->add_option("--qoi", flags.qoi, "response_amplitude or frequency_content")
      ->check(CLI::IsMember({"response_amplitude", "frequency_content"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  setup_logging();
  try {
    const monsel::RunConfig cfg = build_config(flags);
    if (gen->parsed()) {
      std::cout << monsel::cmd_generate(cfg) << "\n";
    } else if (spec->parsed()) {
      monsel::cmd_spectra(cfg);
    } else if (psd->parsed()) {
      const auto r = monsel::cmd_psd(cfg);
      for (const auto& p : r.peaks) std::cout << p.freq_hz << " Hz\n";
    } else if (cal->parsed()) {
      const auto ens = monsel::cmd_calibrate(cfg, monsel::parse_model_id(flags.model));
      std::cout << flags.model << ": " << ens.size() << " samples, log evidence "
                << ens.log_evidence << "\n";
    } else if (sel->parsed()) {
      std::cout << monsel::cmd_select(cfg, monsel::parse_qoi(flags.qoi)).table;
    } else if (rep->parsed()) {
      std::cout << monsel::cmd_report(cfg, monsel::parse_qoi(flags.qoi));
    }
  } catch (const monsel::InputError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const monsel::NumericalError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
