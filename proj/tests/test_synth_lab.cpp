#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "monsel/dataset_io.hpp"
#include "monsel/errors.hpp"
#include "monsel/signals.hpp"
#include "monsel/synth_lab.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace monsel;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TwinConfig quiet(std::size_t n = 8192) {
  TwinConfig cfg;
  cfg.n_samples = n;
  cfg.noise = {0.0, 0.0, 0.0, true};
  return cfg;
}

/// Local maxima of |V2| w^2 on a fine sweep: where the mass acceleration
/// response per unit force peaks.
std::vector<double> accel_frf_peaks(const TwoMassParams& p) {
  std::vector<double> f, v;
  for (int i = 1; i <= 100000; ++i) {
    f.push_back(0.001 * i);
    const double w = kTwoPi * f.back();
    v.push_back(oracle::chain_receptance(f.back(), p.m, p.b, p.k, p.m_f, p.b_f, p.k_f) * w * w);
  }
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] > v[i + 1]) out.push_back(f[i]);
  return out;
}

}  // namespace

TEST_SUITE("synth_lab") {

TEST_CASE("hammer pulse shape") {
  const HammerPulse p;
  CHECK(p.force_at(0.0) == 0.0);
  CHECK(p.force_at(0.011) == doctest::Approx(100.0));
  CHECK(p.force_at(0.0105) == doctest::Approx(100.0 * std::sin(std::numbers::pi / 4)));
  CHECK(p.force_at(0.0125) == 0.0);
}

TEST_CASE("rest stays at rest") {
  TwinConfig cfg = quiet();
  cfg.pulse.peak_force = 0.0;
  const auto d = simulate_experiment(cfg);
  for (const auto* ch : {&d.acc_mass, &d.acc_frame, &d.force})
    for (double v : ch->samples) CHECK(v == 0.0);
}

TEST_CASE("discretization matches a Taylor-series matrix exponential") {
  const auto p = reference_twin_params();
  const double h = 1e-3;
  Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
  // Continuous system written out from the equations of motion.
  aug(0, 2) = 1.0;
  aug(1, 3) = 1.0;
  aug(2, 0) = -p.k / p.m;
  aug(2, 1) = p.k / p.m;
  aug(2, 2) = -p.b / p.m;
  aug(2, 3) = p.b / p.m;
  aug(3, 0) = p.k / p.m_f;
  aug(3, 1) = -(p.k + p.k_f) / p.m_f;
  aug(3, 2) = p.b / p.m_f;
  aug(3, 3) = -(p.b + p.b_f) / p.m_f;
  aug(3, 4) = 1.0 / p.m_f;
  const Eigen::Matrix<double, 5, 5> e = oracle::expm_taylor<5>(aug * h);
  const auto sys = discretize(p, h);
  CHECK((sys.Ad - e.topLeftCorner<4, 4>()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((sys.Bd - e.topRightCorner<4, 1>()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sys.D(0) == 0.0);
  CHECK(sys.D(1) == doctest::Approx(1.0 / p.m_f));
}

TEST_CASE("noise-free FFT of the mass acceleration shows both resonances") {
  const auto cfg = quiet();
  const auto d = simulate_experiment(cfg);
  const auto spec = fft_magnitude(d.acc_mass, 100.0);
  const auto peaks = detect_peaks(spec, 0.01, 1.0);
  REQUIRE(peaks.size() == 2);

  const auto frf = accel_frf_peaks(cfg.true_params);
  REQUIRE(frf.size() == 2);
  const auto modes = modal_frequencies(ModelParams{cfg.true_params});
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(peaks[i].freq_hz - frf[i]) <= spec.bin_width());
    CHECK(std::abs(peaks[i].freq_hz - modes[i]) / modes[i] < 0.02);
  }
}

TEST_CASE("response decays after the pulse") {
  const auto d = simulate_experiment(quiet());
  const auto& x = d.acc_mass.samples;
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, v * v);
  const std::size_t tail = x.size() / 10;
  double ms = 0.0;
  for (std::size_t i = x.size() - tail; i < x.size(); ++i) ms += x[i] * x[i];
  ms /= static_cast<double>(tail);
  CHECK(ms < 0.01 * peak);
}

TEST_CASE("outputs are linear in the pulse amplitude") {
  TwinConfig a = quiet();
  TwinConfig b = quiet();
  b.pulse.peak_force = 2.0 * a.pulse.peak_force;
  const auto da = simulate_experiment(a);
  const auto db = simulate_experiment(b);
  double scale = 0.0;
  for (double v : da.acc_mass.samples) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < da.acc_mass.size(); ++i) {
    CHECK(std::abs(db.acc_mass.samples[i] - 2.0 * da.acc_mass.samples[i]) <= 1e-9 * scale);
    CHECK(db.force.samples[i] == 2.0 * da.force.samples[i]);
  }
}

TEST_CASE("FFT ratio reproduces the receptance near both resonances") {
  const auto cfg = quiet(1 << 16);
  const auto d = simulate_experiment(cfg);
  const auto acc = fft_magnitude(d.acc_mass, 100.0);
  const auto frc = fft_magnitude(d.force, 100.0);
  for (double f_peak : accel_frf_peaks(cfg.true_params)) {
    const auto j = static_cast<std::size_t>(std::lround(f_peak / acc.bin_width()));
    const double w = kTwoPi * acc.freqs[j];
    const double est = acc.mags[j] / frc.mags[j] / (w * w);
    const double ref = v2_receptance(acc.freqs[j], cfg.true_params);
    CHECK(std::abs(est - ref) / ref < 0.10);
  }
}

TEST_CASE("noise is seeded and sized relative to the clean RMS") {
  TwinConfig cfg;
  const auto a = simulate_experiment(cfg);
  const auto b = simulate_experiment(cfg);
  CHECK(a.acc_mass.samples == b.acc_mass.samples);
  CHECK(a.force.samples == b.force.samples);
  cfg.seed = 2;
  const auto c = simulate_experiment(cfg);
  CHECK(a.acc_mass.samples != c.acc_mass.samples);

  const auto clean = simulate_experiment(quiet());
  for (auto [noisy, ref] : {std::pair{&a.acc_mass, &clean.acc_mass}, std::pair{&a.acc_frame, &clean.acc_frame}}) {
    double ss = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < ref->size(); ++i) {
      ss += ref->samples[i] * ref->samples[i];
      const double e = noisy->samples[i] - ref->samples[i];
      nn += e * e;
    }
    CHECK(std::sqrt(nn / ss) == doctest::Approx(0.01).epsilon(0.05));
  }
}

TEST_CASE("twin config validation") {
  TwinConfig cfg;
  cfg.fs = 50.0;
  CHECK_THROWS_WITH_AS(simulate_experiment(cfg), doctest::Contains("upper modal"), InputError);
  cfg = TwinConfig{};
  cfg.n_samples = 1000;
  CHECK_THROWS_WITH_AS(simulate_experiment(cfg), doctest::Contains("10 periods"), InputError);
  cfg = TwinConfig{};
  cfg.pulse.duration = 2.0;
  CHECK_THROWS_AS(simulate_experiment(cfg), InputError);
  cfg = TwinConfig{};
  cfg.true_params.k = -1.0;
  CHECK_THROWS_AS(simulate_experiment(cfg), InputError);
}

TEST_CASE("dataset files round-trip") {
  testutil::TempDir dir("ds");
  Dataset small;
  small.acc_mass = {{1.0, -2.5, 3.25}, 0.001, "acc_mass"};
  small.acc_frame = {{0.0, 1e-17, -4e9}, 0.001, "acc_frame"};
  small.force = {{0.1, 0.2, 0.3}, 0.001, "force"};
  write_dataset(small, dir.file("s.csv"));
  const auto back = read_dataset(dir.file("s.csv"));
  CHECK(back.acc_mass.samples == small.acc_mass.samples);
  CHECK(back.acc_frame.samples == small.acc_frame.samples);
  CHECK(back.force.samples == small.force.samples);
  CHECK(testutil::read_text(dir.file("s.csv")).rfind("t,acc_mass,acc_frame,force\n", 0) == 0);

  const auto twin = simulate_experiment(TwinConfig{});
  write_dataset(twin, dir.file("t.csv"));
  const auto tb = read_dataset(dir.file("t.csv"));
  REQUIRE(tb.acc_mass.size() == 8192);
  CHECK(tb.acc_mass.dt == doctest::Approx(1e-3).epsilon(1e-12));
  for (std::size_t i = 0; i < 8192; ++i) {
    CHECK(std::abs(tb.acc_mass.samples[i] - twin.acc_mass.samples[i]) <= 1e-12 * std::max(1.0, std::abs(twin.acc_mass.samples[i])));
    CHECK(tb.force.samples[i] == twin.force.samples[i]);
  }

  testutil::write_text(dir.file("bad.csv"), "t,acc_frame,acc_mass,force\n0,1,2,3\n0.001,1,2,3\n");
  CHECK_THROWS_WITH_AS(read_dataset(dir.file("bad.csv")), doctest::Contains("header"), InputError);
  testutil::write_text(dir.file("ragged.csv"), "t,acc_mass,acc_frame,force\n0,1,2,3\n0.001,1,2\n");
  CHECK_THROWS_AS(read_dataset(dir.file("ragged.csv")), InputError);
}

TEST_CASE("format_double round-trips and atomic writes leave no temp file") {
  RandomStream rng(60);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::exp(40.0 * rng.uniform() - 20.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  testutil::TempDir dir("atomic");
  write_file_atomic(dir.file("x.txt"), "hello");
  write_file_atomic(dir.file("x.txt"), "world");
  CHECK(testutil::read_text(dir.file("x.txt")) == "world");
  std::size_t count = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++count;
  CHECK(count == 1);
}

}  // TEST_SUITE
