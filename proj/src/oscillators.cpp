#include "monsel/oscillators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "monsel/errors.hpp"

namespace monsel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

CandidateModel default_candidate(ModelId id) {
  return id == ModelId::model1 ? CandidateModel{ModelId::model1, 3, 1.0}
                               : CandidateModel{ModelId::model2, 6, 2.0};
}

int params_dim(ModelId id) { return id == ModelId::model1 ? 3 : 6; }

std::string to_string(ModelId id) { return id == ModelId::model1 ? "model1" : "model2"; }

ModelId parse_model_id(const std::string& s) {
  if (s == "model1") return ModelId::model1;
  if (s == "model2") return ModelId::model2;
  throw_input("parse_model_id", "unknown model '" + s + "' (expected model1 or model2)");
}

void validate(const OneMassParams& p) {
  if (!finite_all({p.m, p.b, p.k}) || !(p.m > 0.0) || !(p.k > 0.0) || !(p.b >= 0.0))
    throw_input("OneMassParams", "need m > 0, k > 0, b >= 0, all finite");
}

void validate(const TwoMassParams& p) {
  validate(OneMassParams{p.m, p.b, p.k});
  if (!finite_all({p.m_f, p.b_f, p.k_f}) || !(p.m_f > 0.0) || !(p.k_f > 0.0) || !(p.b_f >= 0.0))
    throw_input("TwoMassParams", "need m_f > 0, k_f > 0, b_f >= 0, all finite");
}

double v1_transmissibility(double f_hz, const OneMassParams& p) {
  if (!(f_hz >= 0.0)) throw_input("v1_transmissibility", "frequency must be >= 0");
  const double w = kTwoPi * f_hz;
  const double bw = p.b * w;
  const double elastic = p.k - p.m * w * w;
  const double den = elastic * elastic + bw * bw;
  if (den == 0.0) throw_numerical("v1_transmissibility", "undamped resonance");
  return std::sqrt((p.k * p.k + bw * bw) / den);
}

double v2_receptance(double f_hz, const TwoMassParams& p) {
  if (!(f_hz >= 0.0)) throw_input("v2_receptance", "frequency must be >= 0");
  using C = std::complex<double>;
  const double w = kTwoPi * f_hz;
  const C coupling(p.k, w * p.b);
  const C a11 = coupling - p.m * w * w;
  const C a22 = coupling + C(p.k_f, w * p.b_f) - p.m_f * w * w;
  // Cramer's rule with rhs (0, 1): x1 = -a12 / det, a12 = a21 = -coupling.
  const C det = a11 * a22 - coupling * coupling;
  if (det == C(0.0, 0.0)) throw_numerical("v2_receptance", "singular dynamic stiffness");
  return std::abs(coupling) / std::abs(det);
}

MagnitudeSpectrum predict_model1(const OneMassParams& p, const MagnitudeSpectrum& base_acc_spec) {
  validate(p);
  if (base_acc_spec.freqs.empty()) throw_input("predict_model1", "empty spectrum");
  MagnitudeSpectrum out;
  out.freqs = base_acc_spec.freqs;
  out.mags.resize(out.freqs.size());
  out.source_label = "model1";
  for (std::size_t j = 0; j < out.freqs.size(); ++j)
    out.mags[j] = v1_transmissibility(out.freqs[j], p) * base_acc_spec.mags[j];
  return out;
}

MagnitudeSpectrum predict_model2(const TwoMassParams& p, const MagnitudeSpectrum& force_spec) {
  validate(p);
  if (force_spec.freqs.empty()) throw_input("predict_model2", "empty spectrum");
  MagnitudeSpectrum out;
  out.freqs = force_spec.freqs;
  out.mags.resize(out.freqs.size());
  out.source_label = "model2";
  for (std::size_t j = 0; j < out.freqs.size(); ++j) {
    const double w = kTwoPi * out.freqs[j];
    out.mags[j] = v2_receptance(out.freqs[j], p) * w * w * force_spec.mags[j];
  }
  return out;
}

MagnitudeSpectrum predict(const ModelParams& p, const MagnitudeSpectrum& input_spec) {
  return std::visit(
      [&](const auto& q) -> MagnitudeSpectrum {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, OneMassParams>)
          return predict_model1(q, input_spec);
        else
          return predict_model2(q, input_spec);
      },
      p);
}

std::vector<double> modal_frequencies(const ModelParams& params) {
  if (const auto* p = std::get_if<OneMassParams>(&params)) {
    validate(*p);
    return {std::sqrt(p->k / p->m) / kTwoPi};
  }
  const auto& p = std::get<TwoMassParams>(params);
  validate(p);
  Eigen::Matrix2d K;
  K << p.k, -p.k, -p.k, p.k + p.k_f;
  Eigen::Matrix2d M = Eigen::Vector2d(p.m, p.m_f).asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(K, M);
  if (es.info() != Eigen::Success) throw_numerical("modal_frequencies", "eigen solve failed");
  const Eigen::Vector2d lam = es.eigenvalues();  // ascending
  return {std::sqrt(std::max(lam(0), 0.0)) / kTwoPi, std::sqrt(std::max(lam(1), 0.0)) / kTwoPi};
}

}  // namespace monsel
