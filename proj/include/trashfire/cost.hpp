#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "trashfire/dataset.hpp"
#include "trashfire/error.hpp"
#include "trashfire/math/quadrature.hpp"
#include "trashfire/model.hpp"

namespace trashfire {

/// Acc = 1 - false/N.
inline double accuracy(long false_count, long n) {
  if (n < 1) throw DomainError("accuracy: require n >= 1");
  if (false_count < 0 || false_count > n)
    throw DomainError("accuracy: require 0 <= false_count <= n");
  return 1.0 - static_cast<double>(false_count) / static_cast<double>(n);
}

/// Misclassifications per unit time.
inline double failure_rate(long false_count, double dt) {
  if (!(dt > 0.0)) throw DomainError("failure_rate: require dt > 0");
  if (false_count < 0) throw DomainError("failure_rate: require false_count >= 0");
  return static_cast<double>(false_count) / dt;
}

/// Linear hardware cost model: cost-per-second times sample counts.
struct CostModel {
  double c_h = 0.0;      // currency per second of hardware time
  double n_train = 0.0;  // training sample count
  double n_attack = 0.0; // attacked sample count

  void require_valid() const {
    if (!(c_h > 0.0) || !(n_train > 0.0) || !(n_attack > 0.0))
      throw DomainError("CostModel: all fields must be positive");
  }
};

inline double training_cost(const CostModel& cost, double t_train) {
  cost.require_valid();
  if (!(t_train > 0.0)) throw DomainError("training_cost: require t_train > 0");
  return cost.c_h * t_train * cost.n_train;
}

inline double attack_cost(const CostModel& cost, double t_attack) {
  cost.require_valid();
  if (!(t_attack > 0.0)) throw DomainError("attack_cost: require t_attack > 0");
  return cost.c_h * t_attack * cost.n_attack;
}

/// E[T] = integral of S(u|x) over (0, t_star], by adaptive Gauss-Kronrod.
inline double expected_survival(const AftModel& m, const math::Vector& x,
                                double t_star) {
  if (!(t_star > 0.0)) throw DomainError("expected_survival: require t_star > 0");
  const double lp = linear_predictor(m, x);
  const auto integrand = [&](double u) {
    return survival(m.family, m.shape, lp, u);
  };
  const double tol = std::max(1e-12, 1e-9 * t_star);
  return math::integrate(integrand, 0.0, t_star, tol).value;
}

/// Cox E[T]: S(u|x) is a step function of the baseline, so the integral is
/// an exact segment sum (flat extrapolation past the last step).
inline double expected_survival(const CoxModel& m, const math::Vector& x,
                                double t_star) {
  if (!(t_star > 0.0)) throw DomainError("expected_survival: require t_star > 0");
  const double hr = cox_hazard_ratio(m, x);
  double total = 0.0;
  double prev_time = 0.0;
  double prev_h0 = 0.0;
  for (const auto& [time, h0] : m.baseline) {
    if (time >= t_star) break;
    total += std::exp(-prev_h0 * hr) * (time - prev_time);
    prev_time = time;
    prev_h0 = h0;
  }
  total += std::exp(-prev_h0 * hr) * (t_star - prev_time);
  return total;
}

/// Cost-normalized verdict: score = t_train / E[T]; the model is broken
/// when the score exceeds 1 (strictly).
struct TrashReport {
  double t_train = 0.0;           // seconds per training sample
  double expected_survival = 0.0; // seconds
  double trash_score = 0.0;
  bool broken = false;
  double horizon = math::nan;     // t* used for the expectation

  const char* verdict() const { return broken ? "broken" : "not-broken"; }
};

inline TrashReport trash_score(double t_train_per_sample,
                               double expected_survival_seconds,
                               double horizon = math::nan) {
  if (!(t_train_per_sample > 0.0))
    throw DomainError("trash_score: require t_train > 0");
  if (!(expected_survival_seconds > 0.0))
    throw DomainError("trash_score: require expected survival > 0");
  TrashReport rep;
  rep.t_train = t_train_per_sample;
  rep.expected_survival = expected_survival_seconds;
  rep.trash_score = t_train_per_sample / expected_survival_seconds;
  rep.broken = rep.trash_score > 1.0;
  rep.horizon = horizon;
  return rep;
}

/// Rows whose raw attack strength lies in (0, epsilon_max]; encoding and
/// metadata are preserved.
inline SurvivalDataset conditional_subset(const SurvivalDataset& data,
                                          double epsilon_max) {
  if (!(epsilon_max > 0.0))
    throw DomainError("conditional_subset: require epsilon_max > 0");
  if (data.raw_attack_strength.size() != data.n())
    throw ContractError("conditional_subset: dataset carries no raw strengths");

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double eps = data.raw_attack_strength[i];
    if (eps > 0.0 && eps <= epsilon_max) keep.push_back(i);
  }
  if (keep.empty())
    throw EmptySubsetError("conditional_subset: no records with strength in (0, " +
                           std::to_string(epsilon_max) + "]");

  SurvivalDataset out;
  out.meta = data.meta;
  out.split_tag = data.split_tag;
  out.feature_names = data.feature_names;
  out.design = math::Matrix(keep.size(), data.p());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const std::size_t i = keep[k];
    std::copy(data.design.row(i), data.design.row(i) + data.p(), out.design.row(k));
    out.times.push_back(data.times[i]);
    out.events.push_back(data.events[i]);
    out.source_rows.push_back(data.source_rows.empty() ? i : data.source_rows[i]);
    out.raw_attack_strength.push_back(data.raw_attack_strength[i]);
    out.raw_defence_strength.push_back(data.raw_defence_strength[i]);
    out.raw_t_train.push_back(data.raw_t_train[i]);
  }
  return out;
}

/// Default covariate profile for the expectation: column means for the
/// strength and continuous covariates, reference level (zero) for dummies.
inline math::Vector mean_profile(const SurvivalDataset& data) {
  if (data.n() == 0) throw ContractError("mean_profile: empty dataset");
  math::Vector profile(data.p(), 0.0);
  const std::size_t non_dummy = std::min(data.p(), data.meta.dummy_offset());
  for (std::size_t j = 0; j < non_dummy; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) mean += data.design(i, j);
    profile[j] = mean / static_cast<double>(data.n());
  }
  return profile;
}

}  // namespace trashfire
