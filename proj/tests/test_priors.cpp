#include <doctest.h>

#include <cmath>
#include <numbers>

#include "monsel/errors.hpp"
#include "monsel/oscillators.hpp"
#include "monsel/priors.hpp"
#include "oracles.hpp"

using namespace monsel;

TEST_SUITE("priors") {

TEST_CASE("default prior means and spreads") {
  const auto p1 = default_priors(ModelId::model1);
  const auto p2 = default_priors(ModelId::model2);
  CHECK(p1.dim() == 3);
  CHECK(p2.dim() == 6);
  CHECK(p2.names() == std::vector<std::string>{"k", "m", "D", "k_f", "m_f", "D_f"});
  CHECK(p1.marginals[0].sd() == doctest::Approx(2540.604).epsilon(1e-12));
  const double means[] = {38494, 0.925, 0.12, 722, 9.33, 0.03};
  const double covs[] = {0.066, 0.053, 0.10, 0.066, 0.10, 0.15};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(p2.marginals[i].mean == means[i]);
    CHECK(p2.marginals[i].cov == covs[i]);
  }
}

TEST_CASE("sample_prior moments, support and determinism") {
  const auto spec = default_priors(ModelId::model2);
  const std::size_t n = 100000;
  const auto s = sample_prior(spec, n, RandomStream(77));
  REQUIRE(static_cast<std::size_t>(s.rows()) == n);
  REQUIRE(s.cols() == 6);
  CHECK((s.array() > 0.0).all());
  for (Eigen::Index d = 0; d < 6; ++d) {
    const auto& mg = spec.marginals[static_cast<std::size_t>(d)];
    const double mean = s.col(d).mean();
    const double sd = std::sqrt((s.col(d).array() - mean).square().sum() / (n - 1));
    CHECK(std::abs(mean - mg.mean) < 3.0 * mg.sd() / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sd / mean - mg.cov) / mg.cov < 0.02);
  }

  const auto a = sample_prior(spec, 50, RandomStream(5));
  const auto b = sample_prior(spec, 50, RandomStream(5));
  const auto c = sample_prior(spec, 50, RandomStream(6));
  CHECK(a == b);
  CHECK(a != c);
  CHECK(sample_prior(spec, 1, RandomStream(5)).rows() == 1);
  // Rows depend only on their own index.
  CHECK(sample_prior(spec, 10, RandomStream(5)).row(3) == a.row(3));
}

TEST_CASE("a prior with most mass below zero is rejected") {
  PriorSpec bad = default_priors(ModelId::model1);
  for (auto& m : bad.marginals) {
    m.mean = 1.0;
    m.cov = 5.0;
  }
  CHECK_THROWS_WITH_AS(sample_prior(bad, 200, RandomStream(1)), doctest::Contains("rejection"),
                       InputError);
  PriorSpec neg = default_priors(ModelId::model1);
  neg.marginals[0].mean = -1.0;
  CHECK_THROWS_AS(validate(neg), InputError);
  PriorSpec renamed = default_priors(ModelId::model1);
  renamed.marginals[1].name = "mass";
  CHECK_THROWS_AS(validate(renamed), InputError);
}

TEST_CASE("log_prior_pdf") {
  const auto spec = default_priors(ModelId::model2);
  std::vector<double> mean, sd;
  for (const auto& m : spec.marginals) {
    mean.push_back(m.mean);
    sd.push_back(m.sd());
  }
  double at_mean = 0.0;
  for (double s : sd) at_mean -= std::log(s * std::sqrt(2.0 * std::numbers::pi));
  CHECK(log_prior_pdf(spec, mean) == doctest::Approx(at_mean).epsilon(1e-12));

  for (std::size_t d = 0; d < 6; ++d) {
    auto x = mean;
    x[d] += sd[d];
    CHECK(std::abs(log_prior_pdf(spec, x) - at_mean + 0.5) < 1e-12);
  }

  RandomStream rng(8);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(6);
    for (std::size_t d = 0; d < 6; ++d) x[d] = mean[d] + 2.0 * sd[d] * rng.normal();
    const double ref = oracle::normal_product_logpdf(x, mean, sd);
    CHECK(std::abs(log_prior_pdf(spec, x) - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
  }
  CHECK_THROWS_AS(log_prior_pdf(spec, std::vector<double>(3, 1.0)), InputError);
}

TEST_CASE("to_physical maps damping ratios to coefficients") {
  const std::vector<double> th{38494, 0.925, 0.12, 722, 9.33, 0.03};
  const auto p = std::get<TwoMassParams>(to_physical(ModelId::model2, th));
  CHECK(p.b == doctest::Approx(45.28752940931973).epsilon(1e-12));
  CHECK(p.b_f == doctest::Approx(4.9244833231517795).epsilon(1e-12));
  CHECK(damping_ratio(p.b, p.k, p.m) == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(damping_ratio(p.b_f, p.k_f, p.m_f) == doctest::Approx(0.03).epsilon(1e-14));

  const auto q = std::get<OneMassParams>(to_physical(ModelId::model1, std::vector<double>{1, 2, 0}));
  CHECK(q.b == 0.0);
  CHECK_THROWS_AS(to_physical(ModelId::model1, std::vector<double>{0, 2, 0.1}), InputError);
  CHECK_THROWS_AS(to_physical(ModelId::model1, std::vector<double>{1, 2, -0.1}), InputError);
  CHECK_THROWS_AS(to_physical(ModelId::model2, std::vector<double>{1, 2, 0.1}), InputError);
}

TEST_CASE("prior draws give positive real modes") {
  for (ModelId id : kAllModels) {
    const auto s = sample_prior(default_priors(id), 2000, RandomStream(9));
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      const std::span<const double> row(s.data() + i * s.cols(), static_cast<std::size_t>(s.cols()));
      for (double f : modal_frequencies(to_physical(id, row))) {
        CHECK(std::isfinite(f));
        CHECK(f > 0.0);
      }
    }
  }
}

}  // TEST_SUITE
