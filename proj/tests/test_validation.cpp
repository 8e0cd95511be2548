#include <catch2/catch.hpp>

#include <cmath>

#include "trashfire/calibration.hpp"
#include "trashfire/concordance.hpp"
#include "trashfire/fit.hpp"
#include "trashfire/simulate.hpp"
#include "trashfire/validate.hpp"

using namespace trashfire;

namespace {

// Independent O(n^2) oracle: enumerate every pair; a pair is comparable iff
// the times differ and the earlier time is an event; concordant when the
// later survivor has the higher score; score ties earn half credit.
ConcordanceCounts brute_force_counts(const math::Vector& scores,
                                     const math::Vector& times,
                                     const std::vector<std::uint8_t>& events) {
  ConcordanceCounts out;
  const std::size_t n = scores.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (times[i] == times[j]) continue;
      const std::size_t early = times[i] < times[j] ? i : j;
      const std::size_t late = early == i ? j : i;
      if (!events[early]) continue;
      if (scores[late] > scores[early])
        ++out.concordant;
      else if (scores[late] < scores[early])
        ++out.discordant;
      else
        ++out.tied_score;
    }
  }
  return out;
}

double brute_force_concordance(const math::Vector& scores, const math::Vector& times,
                               const std::vector<std::uint8_t>& events) {
  return concordance_from_counts(brute_force_counts(scores, times, events));
}

}  // namespace

TEST_CASE("aic and bic arithmetic", "[metrics]") {
  CHECK(aic(-100.0, 2) == Approx(204.0));
  CHECK(bic(-100.0, 2, 100) == Approx(2.0 * std::log(100.0) + 200.0).epsilon(1e-14));
  CHECK(aic(0.0, 0) == Approx(0.0));
  CHECK_THROWS_AS(bic(0.0, 1, 0), ContractError);
}

TEST_CASE("concordance on hand-worked examples", "[concordance]") {
  // Perfect ordering.
  CHECK(concordance({1, 2, 3}, {1, 2, 3}, {1, 1, 1}) == 1.0);
  // Anti-ordering.
  CHECK(concordance({3, 2, 1}, {1, 2, 3}, {1, 1, 1}) == 0.0);
  // Censoring removes pairs whose earlier time is not an event.
  CHECK(concordance({1, 5, 2}, {1, 2, 3}, {1, 0, 1}) == 1.0);
}

TEST_CASE("concordance edge cases", "[concordance]") {
  // Ties in score earn half credit.
  CHECK(concordance({1, 1}, {1, 2}, {1, 1}) == 0.5);
  // No comparable pairs: all censored.
  CHECK_THROWS_AS(concordance({1, 2}, {1, 2}, {0, 0}), ContractError);
  // Tied times are never comparable.
  CHECK_THROWS_AS(concordance({1, 2}, {3, 3}, {1, 1}), ContractError);
  CHECK_THROWS_AS(concordance({1}, {1}, {1}), ContractError);
}

TEST_CASE("concordance is invariant under monotone transforms",
          "[concordance][property]") {
  Rng rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 5 + rng.below(60);
    math::Vector scores(n), times(n);
    std::vector<std::uint8_t> events(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::floor(rng.uniform() * 10.0);  // force some score ties
      times[i] = 0.1 + std::floor(rng.uniform() * 8.0) * 0.25;  // some time ties
      events[i] = rng.uniform() < 0.7 ? 1 : 0;
    }
    if (std::count(events.begin(), events.end(), 1) == 0) events[0] = 1;
    math::Vector transformed(n);
    for (std::size_t i = 0; i < n; ++i)
      transformed[i] = std::exp(scores[i] * 0.5) + 5.0;  // strictly increasing
    double base;
    try {
      base = concordance(scores, times, events);
    } catch (const ContractError&) {
      continue;  // no comparable pairs in this draw
    }
    CHECK(concordance(transformed, times, events) == base);
  }
}

TEST_CASE("fast concordance equals the brute-force oracle exactly",
          "[concordance][property]") {
  Rng rng(43);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rng.below(300);
    math::Vector scores(n), times(n);
    std::vector<std::uint8_t> events(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::floor(rng.uniform() * 12.0) * 0.5;
      times[i] = 0.05 + std::floor(rng.uniform() * 20.0) * 0.1;
      events[i] = rng.uniform() < 0.65 ? 1 : 0;
    }
    const auto fast = concordance_counts(scores, times, events);
    const auto slow = brute_force_counts(scores, times, events);
    CHECK(fast.concordant == slow.concordant);
    CHECK(fast.discordant == slow.discordant);
    CHECK(fast.tied_score == slow.tied_score);
    if (slow.comparable() > 0)
      CHECK(concordance_from_counts(fast) == brute_force_concordance(scores, times, events));
  }
}

TEST_CASE("ici and e50 hand values", "[calibration]") {
  // Diagonal curve.
  {
    std::vector<CalibrationPoint> pts = {{0.1, 0.1}, {0.5, 0.5}, {0.9, 0.9}};
    const auto [ici, e50] = ici_and_e50(pts);
    CHECK(ici == Approx(0.0).margin(1e-15));
    CHECK(e50 == Approx(0.0).margin(1e-15));
  }
  // Constant offset.
  {
    std::vector<CalibrationPoint> pts = {{0.1, 0.2}, {0.5, 0.6}, {0.9, 1.0}};
    const auto [ici, e50] = ici_and_e50(pts);
    CHECK(ici == Approx(0.1).epsilon(1e-12));
    CHECK(e50 == Approx(0.1).epsilon(1e-12));
  }
  // Mixed gaps: mean 0.1, zero at the median point.
  {
    std::vector<CalibrationPoint> pts = {{0.2, 0.3}, {0.5, 0.5}, {0.8, 0.6}};
    const auto [ici, e50] = ici_and_e50(pts);
    CHECK(ici == Approx(0.1).epsilon(1e-12));
    CHECK(e50 == Approx(0.0).margin(1e-15));
  }
  CHECK_THROWS_AS(ici_and_e50({}), ContractError);
}

TEST_CASE("calibration curve contract errors", "[calibration]") {
  GeneratorSpec spec;
  spec.family = AftFamily::exponential;
  spec.intercept = 0.0;
  spec.coefficients = {{"attack_strength", 1.0}};
  spec.covariates.emplace("attack_strength", CovariateSampler::uniform_range(0.0, 1.0));
  spec.n = 200;
  spec.seed = 1;
  const auto data = generate_dataset(spec).dataset;
  AftModel m;
  m.family = AftFamily::exponential;
  m.theta = {0.0, 1.0};
  m.feature_names = {"attack_strength"};

  CHECK_THROWS_AS(calibration_curve(m, data, default_horizon(data), 2), ContractError);

  // All predictions identical: a model that ignores the covariate.
  AftModel flat = m;
  flat.theta = {0.0, 0.0};
  CHECK_THROWS_AS(calibration_curve(flat, data, default_horizon(data), 5),
                  ContractError);
}

TEST_CASE("well-calibrated data hugs the diagonal", "[calibration]") {
  // Events drawn from the model itself: smoothed observed probabilities stay
  // within a +-0.05 band of the predictions.
  GeneratorSpec spec;
  spec.family = AftFamily::exponential;
  spec.intercept = 0.0;
  spec.coefficients = {{"attack_strength", 1.2}};
  spec.covariates.emplace("attack_strength", CovariateSampler::uniform_range(0.0, 1.0));
  spec.n = 5000;
  spec.seed = 2025;
  const auto data = generate_dataset(spec).dataset;

  AftModel truth;
  truth.family = AftFamily::exponential;
  truth.theta = {0.0, 1.2};
  truth.feature_names = {"attack_strength"};

  const double horizon = default_horizon(data);
  const CalibrationCurve curve = calibration_curve(truth, data, horizon, 5);
  double worst = 0.0;
  for (const auto& p : curve.points)
    worst = std::max(worst, std::fabs(p.predicted - p.observed));
  CHECK(worst < 0.05);

  const auto [ici, e50] = ici_and_e50(curve.points);
  CHECK(ici < 0.02);
  CHECK((e50 <= ici + 1e-12 || e50 < 0.05));  // E50 is one of the ICI terms
}

TEST_CASE("aic and bic agree on ordering at equal parameter counts",
          "[metrics][property]") {
  Rng rng(47);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 1 + static_cast<int>(rng.below(6));
    const std::size_t n = 10 + rng.below(5000);
    const double ll_a = -50.0 - 200.0 * rng.uniform();
    const double ll_b = -50.0 - 200.0 * rng.uniform();
    const bool aic_prefers_a = aic(ll_a, k) < aic(ll_b, k);
    const bool bic_prefers_a = bic(ll_a, k, n) < bic(ll_b, k, n);
    CHECK(aic_prefers_a == bic_prefers_a);
  }
}

TEST_CASE("default horizon is the median event time", "[validate]") {
  SurvivalDataset ds;
  ds.design = math::Matrix(5, 0);
  ds.times = {5.0, 1.0, 3.0, 2.0, 4.0};
  ds.events = {1, 1, 1, 0, 1};
  // Events at 5,1,3,4 -> sorted 1,3,4,5 -> median 3.5.
  CHECK(default_horizon(ds) == Approx(3.5));

  ds.events = {0, 0, 0, 0, 0};
  CHECK_THROWS_AS(default_horizon(ds), ContractError);
}

TEST_CASE("validation report assembles the table-1 block", "[validate]") {
  GeneratorSpec spec;
  spec.family = AftFamily::weibull;
  spec.shape.sigma = 0.7;
  spec.intercept = 0.5;
  spec.coefficients = {{"attack_strength", 0.8}};
  spec.covariates.emplace("attack_strength", CovariateSampler::uniform_range(0.0, 1.0));
  CensoringRule c;
  c.kind = CensoringRule::Kind::quantile;
  c.quantile = 0.2;
  spec.censoring = c;
  spec.n = 1200;
  spec.seed = 9;
  const auto whole = generate_dataset(spec);

  auto [train, test] = encode(whole.records, 3, 0.2);
  const AftModel m = fit_aft(AftFamily::weibull, train);
  const double horizon = default_horizon(train);
  const ValidationReport rep = validate_model(m, train, &test, horizon);

  CHECK(rep.model_name == "weibull");
  REQUIRE(rep.aic.has_value());
  REQUIRE(rep.bic.has_value());
  CHECK(*rep.aic == Approx(aic(m)).epsilon(1e-12));
  CHECK(*rep.bic == Approx(bic(m, train.n())).epsilon(1e-12));
  CHECK(rep.concordance_train > 0.5);
  CHECK(rep.concordance_test > 0.5);
  CHECK(rep.concordance_train <= 1.0);
  CHECK(rep.ici_train >= 0.0);
  CHECK(rep.ici_test >= 0.0);
  CHECK(rep.horizon == Approx(horizon));
  CHECK(rep.n_train == train.n());
  CHECK(rep.n_test == test.n());
  CHECK_FALSE(rep.calibration_train.empty());
  CHECK_FALSE(rep.calibration_test.empty());

  // Round trip through JSON.
  const ValidationReport back = report_from_json(report_to_json(rep));
  CHECK(back.model_name == rep.model_name);
  CHECK(*back.aic == *rep.aic);
  CHECK(back.concordance_test == rep.concordance_test);
  CHECK(back.calibration_train.size() == rep.calibration_train.size());
}

TEST_CASE("cox validation leaves aic and bic empty", "[validate]") {
  GeneratorSpec spec;
  spec.family = AftFamily::exponential;
  spec.intercept = 0.3;
  spec.coefficients = {{"attack_strength", 0.9}};
  spec.covariates.emplace("attack_strength", CovariateSampler::uniform_range(0.0, 1.0));
  spec.n = 800;
  spec.seed = 12;
  const auto whole = generate_dataset(spec);
  auto [train, test] = encode(whole.records, 4, 0.2);
  const CoxModel m = fit_cox(train);
  const ValidationReport rep = validate_model(m, train, &test, default_horizon(train));
  CHECK(rep.model_name == "cox");
  CHECK_FALSE(rep.aic.has_value());
  CHECK_FALSE(rep.bic.has_value());
  CHECK(rep.concordance_train > 0.5);

  const auto j = report_to_json(rep);
  CHECK(j.at("aic").is_null());
  CHECK(j.at("bic").is_null());
}
