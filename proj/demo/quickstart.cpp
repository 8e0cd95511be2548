// End-to-end library walkthrough: generate a synthetic log with known
// ground truth, fit a Weibull AFT model, validate it, and compute the
// cost-normalized verdict. The same flow is available from the CLI
// (simulate -> fit -> validate -> trash); see demo/demo_spec.json.

#include <iostream>

#include "trashfire/trashfire.hpp"

using namespace trashfire;

int main() {
  GeneratorSpec spec;
  spec.family = AftFamily::weibull;
  spec.shape.sigma = 0.6;
  spec.intercept = 0.8;  // phi multiplies time for weibull: larger = faster failure
  spec.coefficients = {{"attack_strength", 1.2}};
  spec.covariates.emplace("attack_strength", CovariateSampler::uniform_range(0.0, 1.0));
  spec.censoring.kind = CensoringRule::Kind::budget;
  spec.censoring.budget = 0.5;  // attack budget in seconds; slower trials censor
  spec.n = 4000;
  spec.seed = 7;

  const auto records = generate(spec);
  auto [train, test] = encode(records, /*seed=*/1, /*test_fraction=*/0.2);
  std::cout << "train n=" << train.n() << " (events " << train.n_events()
            << "), test n=" << test.n() << ", features " << train.p() << "\n";

  const AftModel model = fit_aft(AftFamily::weibull, train);
  std::cout << "fitted sigma=" << model.shape.sigma
            << " loglik=" << model.log_likelihood << "\n";

  const double horizon = default_horizon(train);
  const ValidationReport report = validate_model(model, train, &test, horizon);
  std::cout << "concordance train=" << report.concordance_train
            << " test=" << report.concordance_test
            << " ici test=" << report.ici_test << "\n";

  const SurvivalDataset subset = conditional_subset(train, 0.5);
  const double t_star = *std::max_element(subset.times.begin(), subset.times.end());
  const double expected = expected_survival(model, mean_profile(subset), t_star);
  double t_train_mean = 0.0;
  for (double v : subset.raw_t_train) t_train_mean += v;
  t_train_mean /= static_cast<double>(subset.n());
  const TrashReport verdict = trash_score(t_train_mean, expected, t_star);
  std::cout << "expected survival " << verdict.expected_survival
            << " s, trash score " << verdict.trash_score << " => "
            << verdict.verdict() << "\n";
  return 0;
}
