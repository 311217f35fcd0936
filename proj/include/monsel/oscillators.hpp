#pragma once

#include <string>
#include <variant>
#include <vector>

#include "monsel/signals.hpp"

namespace monsel {

/// Mass on a spring-damper pair driven through its base.
struct OneMassParams {
  double m = 0.0;  // kg
  double b = 0.0;  // N s/m
  double k = 0.0;  // N/m
};

/// Oscillating mass (m, b, k) mounted on a frame (m_f) that is grounded
/// through (k_f, b_f). External force acts on the frame.
struct TwoMassParams {
  double m = 0.0;
  double b = 0.0;
  double k = 0.0;
  double m_f = 0.0;
  double b_f = 0.0;
  double k_f = 0.0;
};

using ModelParams = std::variant<OneMassParams, TwoMassParams>;

enum class ModelId { model1, model2 };

inline constexpr ModelId kAllModels[] = {ModelId::model1, ModelId::model2};

struct CandidateModel {
  ModelId id = ModelId::model1;
  int params_dim = 3;
  double cost_score = 1.0;
};

/// Registry defaults: model1 dim 3 cost 1, model2 dim 6 cost 2.
CandidateModel default_candidate(ModelId id);
int params_dim(ModelId id);

std::string to_string(ModelId id);
ModelId parse_model_id(const std::string& s);

void validate(const OneMassParams& p);
void validate(const TwoMassParams& p);

/// Absolute-acceleration (equivalently displacement) transmissibility of a
/// base-excited single mass:
///   |(k + i w b) / (k - m w^2 + i w b)|,  w = 2 pi f.
/// Throws NumericalError at an undamped resonance.
double v1_transmissibility(double f_hz, const OneMassParams& p);

/// |X_mass / F_frame| of the two-mass chain, from the 2x2 complex system
/// (K + i w C - w^2 M) X = [0, 1]^T with
///   K = [[k, -k], [-k, k + k_f]], C likewise with b, b_f, M = diag(m, m_f).
double v2_receptance(double f_hz, const TwoMassParams& p);

/// V1(f_j) * base_acc[j] on the input grid.
MagnitudeSpectrum predict_model1(const OneMassParams& p, const MagnitudeSpectrum& base_acc_spec);

/// V2(f_j) * (2 pi f_j)^2 * force[j] on the input grid.
MagnitudeSpectrum predict_model2(const TwoMassParams& p, const MagnitudeSpectrum& force_spec);

MagnitudeSpectrum predict(const ModelParams& p, const MagnitudeSpectrum& input_spec);

/// Undamped natural frequencies in Hz, ascending. One entry for a single
/// mass, two for the chain.
std::vector<double> modal_frequencies(const ModelParams& p);

}  // namespace monsel
