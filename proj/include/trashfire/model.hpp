#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trashfire/error.hpp"
#include "trashfire/family.hpp"
#include "trashfire/math/linalg.hpp"

namespace trashfire {

/// A fitted parametric AFT model. theta[0] is the intercept; theta[1 + i]
/// multiplies feature_names[i]. standard_errors (when present) follow the
/// packed parameter order theta..., then sigma or (rho, beta); entries may
/// be NaN when the observed information was singular for that parameter.
struct AftModel {
  AftFamily family = AftFamily::exponential;
  std::vector<double> theta;  // intercept first
  ShapeParams shape;
  double log_likelihood = math::nan;
  int n_params = 0;
  std::vector<std::string> feature_names;
  std::vector<double> standard_errors;

  std::size_t covariate_count() const { return feature_names.size(); }

  void require_consistent() const {
    if (theta.size() != feature_names.size() + 1)
      throw ContractError("AftModel: theta must hold one intercept plus one "
                          "coefficient per feature");
    shape.require_valid(family);
  }
};

inline double linear_predictor(const AftModel& m, const math::Vector& x) {
  if (x.size() != m.covariate_count())
    throw ContractError("covariate vector has length " + std::to_string(x.size()) +
                        ", model expects " + std::to_string(m.covariate_count()));
  double lp = m.theta[0];
  for (std::size_t i = 0; i < x.size(); ++i) lp += m.theta[i + 1] * x[i];
  return lp;
}

/// phi = exp(theta0 + theta.x); strictly positive.
inline double acceleration(const AftModel& m, const math::Vector& x) {
  return std::exp(linear_predictor(m, x));
}

inline double survival(const AftModel& m, const math::Vector& x, double t) {
  return survival(m.family, m.shape, linear_predictor(m, x), t);
}

inline double hazard(const AftModel& m, const math::Vector& x, double t) {
  return hazard(m.family, m.shape, linear_predictor(m, x), t);
}

inline double cumulative_hazard(const AftModel& m, const math::Vector& x, double t) {
  return cumulative_hazard(m.family, m.shape, linear_predictor(m, x), t);
}

inline double density(const AftModel& m, const math::Vector& x, double t) {
  return density(m.family, m.shape, linear_predictor(m, x), t);
}

inline double median_survival(const AftModel& m, const math::Vector& x) {
  return median_survival(m.family, m.shape, linear_predictor(m, x));
}

/// Generalized-gamma parameters that reproduce a weibull (or exponential)
/// model exactly: rho = 1, beta = 1/sigma, lambda = 1, theta negated
/// (the two families put phi on opposite sides of t).
inline AftModel generalized_gamma_embedding(const AftModel& source) {
  if (source.family != AftFamily::weibull &&
      source.family != AftFamily::exponential)
    throw ContractError("generalized_gamma_embedding: source must be weibull "
                        "or exponential");
  AftModel gg = source;
  gg.family = AftFamily::generalized_gamma;
  for (double& v : gg.theta) v = -v;
  gg.shape.rho = 1.0;
  gg.shape.beta = source.family == AftFamily::weibull ? 1.0 / source.shape.sigma : 1.0;
  gg.shape.lambda = 1.0;
  gg.standard_errors.clear();
  return gg;
}

// ---------------------------------------------------------------------------
// Cox proportional hazards
// ---------------------------------------------------------------------------

/// Cox model with a Breslow step-function baseline cumulative hazard.
/// `baseline` holds (event time, H0 value) pairs sorted by time; H0(0) = 0.
struct CoxModel {
  std::vector<double> theta;  // no intercept
  std::vector<std::pair<double, double>> baseline;
  double log_partial_likelihood = math::nan;
  std::vector<std::string> feature_names;
  std::vector<double> standard_errors;

  void require_consistent() const {
    if (theta.size() != feature_names.size())
      throw ContractError("CoxModel: one coefficient per feature required");
    double prev_t = 0.0, prev_h = 0.0;
    for (const auto& [t, h] : baseline) {
      if (t < prev_t || h < prev_h - 1e-15)
        throw ContractError("CoxModel: baseline must be non-decreasing");
      prev_t = t;
      prev_h = h;
    }
  }
};

inline double cox_linear_predictor(const CoxModel& m, const math::Vector& x) {
  if (x.size() != m.theta.size())
    throw ContractError("covariate vector has length " + std::to_string(x.size()) +
                        ", model expects " + std::to_string(m.theta.size()));
  return math::dot(m.theta, x);
}

inline double cox_hazard_ratio(const CoxModel& m, const math::Vector& x) {
  return std::exp(cox_linear_predictor(m, x));
}

/// Step lookup of the baseline cumulative hazard H0(t); `extrapolated` out
/// parameter reports whether t lies beyond the last baseline step.
inline double cox_baseline_cumulative_hazard(const CoxModel& m, double t,
                                             bool* extrapolated = nullptr) {
  if (t < 0.0) throw DomainError("cox baseline: require t >= 0");
  if (extrapolated)
    *extrapolated = !m.baseline.empty() && t > m.baseline.back().first;
  const auto it = std::upper_bound(
      m.baseline.begin(), m.baseline.end(), t,
      [](double lhs, const std::pair<double, double>& p) { return lhs < p.first; });
  if (it == m.baseline.begin()) return 0.0;
  return std::prev(it)->second;
}

struct CoxSurvival {
  double value = 1.0;
  bool extrapolated = false;  // t was beyond the last baseline step
};

inline CoxSurvival cox_survival(const CoxModel& m, const math::Vector& x, double t) {
  CoxSurvival out;
  const double h0 = cox_baseline_cumulative_hazard(m, t, &out.extrapolated);
  out.value = std::exp(-h0 * cox_hazard_ratio(m, x));
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization (model documents)
// ---------------------------------------------------------------------------

namespace detail {

// Standard errors may contain NaN for flagged parameters; JSON carries
// those as null.
inline nlohmann::json se_to_json(const std::vector<double>& se) {
  if (se.empty()) return nullptr;
  nlohmann::json arr = nlohmann::json::array();
  for (double v : se)
    arr.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
  return arr;
}

inline std::vector<double> se_from_json(const nlohmann::json& j) {
  std::vector<double> se;
  if (!j.is_array()) return se;
  for (const auto& v : j)
    se.push_back(v.is_null() ? math::nan : v.get<double>());
  return se;
}

}  // namespace detail

inline nlohmann::json model_to_json(const AftModel& m) {
  nlohmann::json j;
  j["family"] = to_string(m.family);
  j["feature_names"] = m.feature_names;
  j["coefficients"] = m.theta;
  nlohmann::json shape = nlohmann::json::object();
  switch (m.family) {
    case AftFamily::exponential: break;
    case AftFamily::weibull:
    case AftFamily::log_normal:
    case AftFamily::log_logistic:
      shape["sigma"] = m.shape.sigma;
      break;
    case AftFamily::generalized_gamma:
      shape["rho"] = m.shape.rho;
      shape["beta"] = m.shape.beta;
      shape["lambda"] = m.shape.lambda;
      break;
  }
  j["shape"] = shape;
  j["log_likelihood"] = m.log_likelihood;
  j["n_params"] = m.n_params;
  j["standard_errors"] = detail::se_to_json(m.standard_errors);
  return j;
}

inline AftModel aft_model_from_json(const nlohmann::json& j) {
  AftModel m;
  m.family = family_from_string(j.at("family").get<std::string>());
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.theta = j.at("coefficients").get<std::vector<double>>();
  const auto& shape = j.at("shape");
  if (shape.contains("sigma")) m.shape.sigma = shape.at("sigma").get<double>();
  if (shape.contains("rho")) m.shape.rho = shape.at("rho").get<double>();
  if (shape.contains("beta")) m.shape.beta = shape.at("beta").get<double>();
  if (shape.contains("lambda")) m.shape.lambda = shape.at("lambda").get<double>();
  m.log_likelihood = j.at("log_likelihood").get<double>();
  m.n_params = j.at("n_params").get<int>();
  if (j.contains("standard_errors"))
    m.standard_errors = detail::se_from_json(j.at("standard_errors"));
  m.require_consistent();
  return m;
}

inline nlohmann::json model_to_json(const CoxModel& m) {
  nlohmann::json j;
  j["family"] = "cox";
  j["feature_names"] = m.feature_names;
  j["coefficients"] = m.theta;
  nlohmann::json baseline = nlohmann::json::array();
  for (const auto& [t, h] : m.baseline) baseline.push_back({t, h});
  j["baseline"] = baseline;
  j["log_partial_likelihood"] = m.log_partial_likelihood;
  j["standard_errors"] = detail::se_to_json(m.standard_errors);
  return j;
}

inline CoxModel cox_model_from_json(const nlohmann::json& j) {
  CoxModel m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.theta = j.at("coefficients").get<std::vector<double>>();
  for (const auto& pair : j.at("baseline"))
    m.baseline.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  m.log_partial_likelihood = j.at("log_partial_likelihood").get<double>();
  if (j.contains("standard_errors"))
    m.standard_errors = detail::se_from_json(j.at("standard_errors"));
  m.require_consistent();
  return m;
}

inline bool is_cox_json(const nlohmann::json& j) {
  return j.at("family").get<std::string>() == "cox";
}

}  // namespace trashfire
