#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "monsel/dataset_io.hpp"
#include "monsel/decision.hpp"
#include "monsel/inference.hpp"
#include "monsel/run_config.hpp"

namespace monsel {

/// Band-limited magnitude spectra of the three channels.
struct ChannelSpectra {
  MagnitudeSpectrum acc_mass;   // observed response of the oscillating mass
  MagnitudeSpectrum acc_frame;  // model1 input
  MagnitudeSpectrum force;      // model2 input

  const MagnitudeSpectrum& input_for(ModelId id) const {
    return id == ModelId::model1 ? acc_frame : force;
  }
};

ChannelSpectra compute_spectra(const Dataset& data, double f_max);

/// Writes the dataset CSV and a `<dataset>.truth.json` sidecar. Requires the
/// twin block.
std::string cmd_generate(const RunConfig& cfg);

/// spectrum_<channel>.csv for each channel.
void cmd_spectra(const RunConfig& cfg);

struct PsdResult {
  PsdEstimate psd;
  std::vector<PeakInfo> peaks;
};

/// Welch PSD of the mass acceleration and its peaks, using the run's
/// settings.
PsdResult analyze_frequency_content(const TimeSeries& acc_mass, const RunConfig& cfg);

/// psd_acc_mass.csv and peaks.json.
PsdResult cmd_psd(const RunConfig& cfg);

/// ensemble_<model>.csv/.json plus bands_prior_<model>.csv and
/// bands_posterior_<model>.csv.
PosteriorEnsemble cmd_calibrate(const RunConfig& cfg, ModelId id);

struct SelectResult {
  nlohmann::ordered_json report;
  std::string table;
};

/// report_<qoi>.json. Reuses ensemble files written by a calibrate run with
/// the same seed and sampler settings; calibrates otherwise.
SelectResult cmd_select(const RunConfig& cfg, Qoi qoi);

/// Human-readable table for a report JSON.
std::string format_report_table(const nlohmann::ordered_json& report);

/// Reads report_<qoi>.json and returns its table.
std::string cmd_report(const RunConfig& cfg, Qoi qoi);

/// Deterministic per-model seed derived from the run seed.
std::uint64_t calibration_seed(std::uint64_t run_seed, ModelId id);

/// Structural check of a report document against the documented schema;
/// returns a list of problems (empty when valid).
std::vector<std::string> check_report_schema(const nlohmann::json& report);

}  // namespace monsel
