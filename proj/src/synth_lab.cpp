#include "monsel/synth_lab.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "monsel/errors.hpp"
#include "monsel/priors.hpp"
#include "monsel/random.hpp"

namespace monsel {

double HammerPulse::force_at(double t) const {
  if (t < start_time || t > start_time + duration) return 0.0;
  return peak_force * std::sin(std::numbers::pi * (t - start_time) / duration);
}

TwoMassParams reference_twin_params() {
  const double k = 38494.0, m = 0.925, d = 0.12;
  const double kf = 722.0, mf = 9.33, df = 0.03;
  return {m, 2.0 * d * std::sqrt(k * m), k, mf, 2.0 * df * std::sqrt(kf * mf), kf};
}

void validate(const TwinConfig& cfg) {
  validate(cfg.true_params);
  if (!(cfg.fs > 0.0)) throw_input("TwinConfig", "fs must be > 0");
  if (cfg.n_samples < 4) throw_input("TwinConfig", "n_samples must be >= 4");
  const auto modes = modal_frequencies(cfg.true_params);
  if (!(cfg.fs > 2.0 * modes.back()))
    throw_input("TwinConfig", "fs must exceed twice the upper modal frequency");
  const double record = static_cast<double>(cfg.n_samples) / cfg.fs;
  if (record * modes.front() < 10.0)
    throw_input("TwinConfig", "record must cover at least 10 periods of the lower mode");
  const auto& p = cfg.pulse;
  if (!(p.peak_force >= 0.0) || !(p.duration > 0.0) || !(p.start_time >= 0.0))
    throw_input("TwinConfig", "pulse needs peak_force >= 0, duration > 0, start_time >= 0");
  if (p.duration > 0.1 * record || p.start_time + p.duration > record)
    throw_input("TwinConfig", "pulse must be short and inside the record");
  const auto& nz = cfg.noise;
  if (!(nz.acc_mass >= 0.0) || !(nz.acc_frame >= 0.0) || !(nz.force >= 0.0))
    throw_input("TwinConfig", "noise levels must be >= 0");
}

DiscreteSystem discretize(const TwoMassParams& p, double h) {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  A(0, 2) = 1.0;
  A(1, 3) = 1.0;
  A(2, 0) = -p.k / p.m;
  A(2, 1) = p.k / p.m;
  A(2, 2) = -p.b / p.m;
  A(2, 3) = p.b / p.m;
  A(3, 0) = p.k / p.m_f;
  A(3, 1) = -(p.k + p.k_f) / p.m_f;
  A(3, 2) = p.b / p.m_f;
  A(3, 3) = -(p.b + p.b_f) / p.m_f;
  Eigen::Vector4d B(0.0, 0.0, 0.0, 1.0 / p.m_f);

  Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
  aug.topLeftCorner<4, 4>() = A * h;
  aug.topRightCorner<4, 1>() = B * h;
  const Eigen::Matrix<double, 5, 5> e = aug.exp();

  DiscreteSystem sys;
  sys.Ad = e.topLeftCorner<4, 4>();
  sys.Bd = e.topRightCorner<4, 1>();
  sys.C = A.bottomRows<2>();
  sys.D = B.tail<2>();
  return sys;
}

Dataset simulate_experiment(const TwinConfig& cfg) {
  validate(cfg);
  const std::size_t n = cfg.n_samples;
  const double h = 1.0 / cfg.fs;
  const DiscreteSystem sys = discretize(cfg.true_params, h);

  std::vector<double> acc_mass(n), acc_frame(n), force(n);
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = cfg.pulse.force_at((static_cast<double>(i) + 0.5) * h);
    const Eigen::Vector2d a = sys.C * x + sys.D * u;
    acc_mass[i] = a(0);
    acc_frame[i] = a(1);
    force[i] = u;
    x = sys.Ad * x + sys.Bd * u;
  }

  const RandomStream root(cfg.seed);
  auto add_noise = [&](std::vector<double>& ch, double level, std::uint64_t stream_id) {
    double rms = level;
    if (cfg.noise.relative) {
      double ss = 0.0;
      for (double v : ch) ss += v * v;
      rms = level * std::sqrt(ss / static_cast<double>(ch.size()));
    }
    if (rms == 0.0) return;
    RandomStream s = root.substream(stream_id);
    for (double& v : ch) v += rms * s.normal();
  };
  add_noise(acc_mass, cfg.noise.acc_mass, 0);
  add_noise(acc_frame, cfg.noise.acc_frame, 1);
  add_noise(force, cfg.noise.force, 2);

  Dataset d;
  d.acc_mass = {std::move(acc_mass), h, "acc_mass"};
  d.acc_frame = {std::move(acc_frame), h, "acc_frame"};
  d.force = {std::move(force), h, "force"};
  return d;
}

}  // namespace monsel
