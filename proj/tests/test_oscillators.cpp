#include <doctest.h>

#include <cmath>
#include <numbers>

#include "monsel/errors.hpp"
#include "monsel/oscillators.hpp"
#include "monsel/random.hpp"
#include "oracles.hpp"

using namespace monsel;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Prior-mean rig: k, m, zeta for the mass and k_f, m_f, zeta_f for the frame.
const double kK = 38494.0, kM = 0.925, kKf = 722.0, kMf = 9.33;
const double kB = 2.0 * 0.12 * std::sqrt(kK * kM);
const double kBf = 2.0 * 0.03 * std::sqrt(kKf * kMf);

OneMassParams rig1() { return {kM, kB, kK}; }
TwoMassParams rig2() { return {kM, kB, kK, kMf, kBf, kKf}; }

MagnitudeSpectrum flat_spectrum(std::size_t n, double df) {
  MagnitudeSpectrum s;
  for (std::size_t j = 0; j < n; ++j) {
    s.freqs.push_back(df * static_cast<double>(j));
    s.mags.push_back(1.0);
  }
  return s;
}

}  // namespace

TEST_SUITE("oscillators") {

TEST_CASE("damping coefficients at the prior means") {
  CHECK(kB == doctest::Approx(45.28752940931973).epsilon(1e-12));
  CHECK(kBf == doctest::Approx(4.9244833231517795).epsilon(1e-12));
}

TEST_CASE("V1 reference values") {
  CHECK(v1_transmissibility(0.0, rig1()) == 1.0);
  const double fn = std::sqrt(kK / kM) / kTwoPi;
  CHECK(std::abs(v1_transmissibility(fn, rig1()) - 4.28498671072748) / 4.28498671072748 < 1e-9);
  // Far above resonance the damper dominates: V1 -> b / (m w).
  const double w = kTwoPi * 1e6;
  CHECK(v1_transmissibility(1e6, rig1()) == doctest::Approx(kB / (kM * w)).epsilon(1e-6));
  CHECK(v1_transmissibility(1e6, rig1()) < v1_transmissibility(1e3, rig1()));
}

TEST_CASE("V1 matches the relative-motion oracle") {
  RandomStream rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double m = 0.1 + 10.0 * rng.uniform();
    const double k = 100.0 + 1e5 * rng.uniform();
    const double b = 200.0 * rng.uniform();
    const double f = 200.0 * rng.uniform();
    const OneMassParams p{m, b, k};
    const double ref = oracle::sdof_transmissibility(f, m, b, k);
    CHECK(std::abs(v1_transmissibility(f, p) - ref) / ref < 1e-10);
  }
}

TEST_CASE("V1 is invariant under common scaling of m, b, k") {
  RandomStream rng(4);
  for (int i = 0; i < 200; ++i) {
    const double alpha = std::exp(6.0 * rng.uniform() - 3.0);
    const double f = 100.0 * rng.uniform();
    const OneMassParams p = rig1();
    const OneMassParams q{alpha * p.m, alpha * p.b, alpha * p.k};
    CHECK(v1_transmissibility(f, q) == doctest::Approx(v1_transmissibility(f, p)).epsilon(1e-12));
  }
}

TEST_CASE("V1 at an undamped exact resonance raises NumericalError") {
  const double w = kTwoPi * 0.5;
  const OneMassParams p{1.0, 0.0, 1.0 * w * w};
  CHECK_THROWS_AS(v1_transmissibility(0.5, p), NumericalError);
}

TEST_CASE("V2 static limit and oracle agreement") {
  CHECK(std::abs(v2_receptance(0.0, rig2()) - 1.0 / 722.0) / (1.0 / 722.0) < 1e-9);
  RandomStream rng(5);
  for (int i = 0; i < 2000; ++i) {
    const TwoMassParams p{0.1 + 5 * rng.uniform(),   1 + 100 * rng.uniform(),
                          1e3 + 1e5 * rng.uniform(), 1 + 20 * rng.uniform(),
                          10 * rng.uniform(),        100 + 2e3 * rng.uniform()};
    const double f = 100.0 * rng.uniform();
    const double ref = oracle::chain_receptance(f, p.m, p.b, p.k, p.m_f, p.b_f, p.k_f);
    CHECK(std::abs(v2_receptance(f, p) - ref) / ref < 1e-12);
  }
}

TEST_CASE("V2 has two resonance maxima below 100 Hz") {
  const TwoMassParams p = rig2();
  std::vector<double> v;
  for (int i = 0; i <= 10000; ++i) v.push_back(v2_receptance(0.01 * i, p));
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] > v[i + 1]) ++maxima;
  CHECK(maxima == 2);
}

TEST_CASE("undamped receptance matrix is symmetric") {
  TwoMassParams p = rig2();
  p.b = 0.0;
  p.b_f = 0.0;
  for (double f : {0.3, 5.0, 12.7, 50.0, 80.0}) {
    const auto a = oracle::chain_matrix(f, p.m, p.b, p.k, p.m_f, p.b_f, p.k_f);
    // Response of the frame to a force on the mass.
    const double cross = std::abs(oracle::solve2(a, {oracle::cplx(1.0), oracle::cplx(0.0)})[1]);
    CHECK(v2_receptance(f, p) == doctest::Approx(cross).epsilon(1e-12));
  }
}

TEST_CASE("predict_model1 and predict_model2 shape the input spectrum") {
  const auto in = flat_spectrum(101, 1.0);
  const auto y1 = predict_model1(rig1(), in);
  const auto y2 = predict_model2(rig2(), in);
  REQUIRE(y1.size() == in.size());
  REQUIRE(y2.size() == in.size());
  CHECK(y1.freqs == in.freqs);
  CHECK(y1.mags[0] == 1.0);
  CHECK(y2.mags[0] == 0.0);
  for (std::size_t j = 1; j < in.size(); ++j) {
    const double w = kTwoPi * in.freqs[j];
    CHECK(y1.mags[j] == doctest::Approx(v1_transmissibility(in.freqs[j], rig1())).epsilon(1e-15));
    CHECK(y2.mags[j] ==
          doctest::Approx(w * w * v2_receptance(in.freqs[j], rig2())).epsilon(1e-14));
  }

  auto zero = in;
  for (double& v : zero.mags) v = 0.0;
  for (double v : predict(ModelParams{rig2()}, zero).mags) CHECK(v == 0.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(predict_model1({0.0, 1.0, 1.0}, flat_spectrum(4, 1.0)), InputError);
  CHECK_THROWS_AS(predict_model1({1.0, -1.0, 1.0}, flat_spectrum(4, 1.0)), InputError);
  TwoMassParams p = rig2();
  p.k_f = std::nan("");
  CHECK_THROWS_AS(validate(p), InputError);
  CHECK_THROWS_AS(parse_model_id("model3"), InputError);
  CHECK(parse_model_id("model2") == ModelId::model2);
  CHECK(params_dim(ModelId::model1) == 3);
  CHECK(params_dim(ModelId::model2) == 6);
}

TEST_CASE("modal frequencies") {
  const auto m1 = modal_frequencies(ModelParams{rig1()});
  REQUIRE(m1.size() == 1);
  CHECK(m1[0] == doctest::Approx(32.467271017625315).epsilon(1e-12));

  const auto m2 = modal_frequencies(ModelParams{rig2()});
  REQUIRE(m2.size() == 2);
  const auto ref = oracle::chain_modes(kM, kK, kMf, kKf);
  CHECK(m2[0] == doctest::Approx(ref[0]).epsilon(1e-9));
  CHECK(m2[1] == doctest::Approx(ref[1]).epsilon(1e-9));
  CHECK(m2[0] == doctest::Approx(1.33532725).epsilon(1e-8));
  CHECK(m2[1] == doctest::Approx(34.04128786).epsilon(1e-8));
}

TEST_CASE("a stiff frame reproduces the single-mass mode") {
  TwoMassParams p = rig2();
  p.k_f = 1e12;
  const auto m2 = modal_frequencies(ModelParams{p});
  CHECK(m2[0] == doctest::Approx(std::sqrt(kK / kM) / kTwoPi).epsilon(1e-4));
}

TEST_CASE("modes interlace around the uncoupled frequencies") {
  RandomStream rng(6);
  for (int i = 0; i < 500; ++i) {
    const double m = 0.1 + 5 * rng.uniform(), k = 1e3 + 1e5 * rng.uniform();
    const double mf = 1 + 20 * rng.uniform(), kf = 100 + 1e4 * rng.uniform();
    const auto modes = modal_frequencies(ModelParams{TwoMassParams{m, 0.0, k, mf, 0.0, kf}});
    const double f_mass = std::sqrt(k / m) / kTwoPi;
    const double f_frame = std::sqrt((k + kf) / mf) / kTwoPi;
    CHECK(modes[0] > 0.0);
    CHECK(modes[0] <= std::min(f_mass, f_frame) * (1 + 1e-12));
    CHECK(modes[1] >= std::max(f_mass, f_frame) * (1 - 1e-12));
  }
}

}  // TEST_SUITE
