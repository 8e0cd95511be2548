#include <catch2/catch.hpp>

#include <cmath>

#include "trashfire/cost.hpp"
#include "trashfire/math/special.hpp"
#include "trashfire/simulate.hpp"

using namespace trashfire;

TEST_CASE("accuracy and failure rate", "[cost]") {
  CHECK(accuracy(10, 100) == Approx(0.9));
  CHECK(accuracy(0, 5) == Approx(1.0));
  CHECK(failure_rate(5, 2.0) == Approx(2.5));
  CHECK(failure_rate(0, 1.0) == Approx(0.0));
  CHECK_THROWS_AS(accuracy(3, 0), DomainError);
  CHECK_THROWS_AS(accuracy(7, 5), DomainError);
  CHECK_THROWS_AS(failure_rate(1, 0.0), DomainError);
  CHECK_THROWS_AS(failure_rate(1, -2.0), DomainError);
}

TEST_CASE("linear hardware costs", "[cost]") {
  CostModel cost{2.0, 4.0, 100.0};
  CHECK(training_cost(cost, 3.0) == Approx(24.0));
  CHECK(attack_cost(CostModel{1.0, 1.0, 100.0}, 0.5) == Approx(50.0));
  CHECK(training_cost(CostModel{2.0, 1.0, 1.0}, 3.0) == Approx(6.0));
  CHECK_THROWS_AS(training_cost(CostModel{0.0, 1.0, 1.0}, 1.0), DomainError);
}

namespace {

AftModel no_covariate_model(AftFamily family, double theta0, ShapeParams shape = {}) {
  AftModel m;
  m.family = family;
  m.theta = {theta0};
  m.shape = shape;
  return m;
}

}  // namespace

TEST_CASE("expected survival closed forms", "[cost][quadrature]") {
  const auto unit_exp = no_covariate_model(AftFamily::exponential, 0.0);

  // t* = ln 2 gives 1 - exp(-ln 2) = 1/2.
  CHECK(expected_survival(unit_exp, {}, std::log(2.0)) == Approx(0.5).epsilon(1e-9));
  // Large t*: the unit exponential mean.
  CHECK(expected_survival(unit_exp, {}, 50.0) == Approx(1.0).epsilon(1e-9));
  // Tiny t*: the integral vanishes with the interval.
  CHECK(expected_survival(unit_exp, {}, 1e-9) == Approx(1e-9).epsilon(1e-6));
  CHECK_THROWS_AS(expected_survival(unit_exp, {}, 0.0), DomainError);

  // Weibull closed form via the regularized incomplete gamma:
  // E = Gamma(sigma + 1) / phi * P(sigma, (phi t*)^(1/sigma)).
  Rng rng(71);
  for (int rep = 0; rep < 40; ++rep) {
    ShapeParams shape;
    shape.sigma = 0.4 + 1.6 * rng.uniform();
    const double theta0 = -1.0 + 2.0 * rng.uniform();
    const double phi = std::exp(theta0);
    const double t_star = 0.5 + 6.0 * rng.uniform();
    const auto m = no_covariate_model(AftFamily::weibull, theta0, shape);
    const double closed = std::exp(std::lgamma(shape.sigma + 1.0)) / phi *
                          math::gamma_p(shape.sigma,
                                        std::pow(phi * t_star, 1.0 / shape.sigma));
    CHECK(expected_survival(m, {}, t_star) == Approx(closed).epsilon(1e-6));
  }
}

TEST_CASE("expected survival bounds and monotonicity", "[cost][property]") {
  Rng rng(73);
  for (int rep = 0; rep < 60; ++rep) {
    ShapeParams shape;
    shape.sigma = 0.5 + 1.5 * rng.uniform();
    const AftFamily families[] = {AftFamily::exponential, AftFamily::weibull,
                                  AftFamily::log_normal, AftFamily::log_logistic};
    const auto f = families[rng.below(4)];
    const auto m = no_covariate_model(f, -0.5 + rng.uniform(), shape);
    const double t_star = 0.2 + 5.0 * rng.uniform();
    const double e = expected_survival(m, {}, t_star);
    CHECK(e <= t_star + 1e-9);
    CHECK(e >= t_star * survival(m, {}, t_star) - 1e-9);
    // Non-decreasing in the horizon.
    CHECK(expected_survival(m, {}, t_star * 1.5) >= e - 1e-9);
  }
}

TEST_CASE("cox expected survival is an exact step sum", "[cost][cox]") {
  CoxModel m;
  m.feature_names = {};
  m.theta = {};
  m.baseline = {{1.0, 0.5}, {2.0, 1.0}};
  m.log_partial_likelihood = 0.0;
  // S = 1 on [0,1), e^-0.5 on [1,2), e^-1 beyond.
  const double expected = 1.0 + std::exp(-0.5) + std::exp(-1.0);
  CHECK(expected_survival(m, {}, 3.0) == Approx(expected).epsilon(1e-14));
  CHECK(expected_survival(m, {}, 0.5) == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("trash score semantics", "[cost]") {
  const TrashReport broken = trash_score(10.0, 2.0);
  CHECK(broken.trash_score == Approx(5.0));
  CHECK(broken.broken);
  CHECK(std::string(broken.verdict()) == "broken");

  // Strict inequality at the boundary.
  const TrashReport boundary = trash_score(1.0, 1.0);
  CHECK(boundary.trash_score == Approx(1.0));
  CHECK_FALSE(boundary.broken);
  CHECK(std::string(boundary.verdict()) == "not-broken");

  const TrashReport cheap = trash_score(0.001, 10.0);
  CHECK(cheap.trash_score == Approx(1e-4));
  CHECK_FALSE(cheap.broken);

  CHECK_THROWS_AS(trash_score(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(trash_score(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(trash_score(1.0, -1.0), DomainError);
}

TEST_CASE("trash score reciprocity", "[cost][property]") {
  Rng rng(79);
  for (int rep = 0; rep < 100; ++rep) {
    const double a = 0.01 + 10.0 * rng.uniform();
    const double b = 0.01 + 10.0 * rng.uniform();
    CHECK(trash_score(a, b).trash_score * trash_score(b, a).trash_score ==
          Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conditional subset filters on raw strength", "[cost]") {
  SurvivalDataset ds;
  ds.design = math::Matrix(3, 1);
  for (std::size_t i = 0; i < 3; ++i) ds.design(i, 0) = 0.1 * (i + 1);
  ds.times = {1.0, 2.0, 3.0};
  ds.events = {1, 1, 0};
  ds.feature_names = {"attack_strength"};
  ds.raw_attack_strength = {0.1, 0.5, 1.0};
  ds.raw_defence_strength = {0.0, 0.0, 0.0};
  ds.raw_t_train = {0.004, 0.004, 0.004};

  const SurvivalDataset two = conditional_subset(ds, 0.5);
  CHECK(two.n() == 2);
  CHECK(two.raw_attack_strength == std::vector<double>{0.1, 0.5});
  CHECK(two.times == std::vector<double>{1.0, 2.0});

  const SurvivalDataset all = conditional_subset(ds, math::inf);
  CHECK(all.n() == 3);

  CHECK_THROWS_AS(conditional_subset(ds, 0.05), EmptySubsetError);
  CHECK_THROWS_AS(conditional_subset(ds, 0.0), DomainError);
}

TEST_CASE("mean profile zeroes dummies and averages the rest", "[cost]") {
  GeneratorSpec spec;
  spec.family = AftFamily::exponential;
  spec.intercept = 0.0;
  spec.n = 50;
  spec.seed = 6;
  spec.covariates.emplace("attack",
                          CovariateSampler::categorical({{"fgm", 1.0}, {"pgd", 1.0}}));
  const auto records = generate(spec);
  auto [train, test] = encode(records, 2, 0.2);
  const math::Vector profile = mean_profile(train);
  REQUIRE(profile.size() == train.p());
  // Dummy columns sit after the continuous block and are zeroed.
  for (std::size_t j = train.meta.dummy_offset(); j < train.p(); ++j)
    CHECK(profile[j] == 0.0);
  // The strength column mean matches a direct average.
  double mean0 = 0.0;
  for (std::size_t i = 0; i < train.n(); ++i) mean0 += train.design(i, 0);
  mean0 /= static_cast<double>(train.n());
  CHECK(profile[0] == Approx(mean0));
}
