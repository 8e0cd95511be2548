#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trashfire/calibration.hpp"
#include "trashfire/concordance.hpp"
#include "trashfire/dataset.hpp"
#include "trashfire/error.hpp"
#include "trashfire/model.hpp"

namespace trashfire {

/// Akaike information criterion, 2k - 2 log L.
inline double aic(double log_likelihood, int n_params) {
  return 2.0 * n_params - 2.0 * log_likelihood;
}

inline double aic(const AftModel& m) { return aic(m.log_likelihood, m.n_params); }

/// Bayesian information criterion, k log n - 2 log L.
inline double bic(double log_likelihood, int n_params, std::size_t n) {
  if (n < 1) throw ContractError("bic: need n >= 1");
  return static_cast<double>(n_params) * std::log(static_cast<double>(n)) -
         2.0 * log_likelihood;
}

inline double bic(const AftModel& m, std::size_t n) {
  return bic(m.log_likelihood, m.n_params, n);
}

/// Default calibration horizon: the median observed event time
/// (average-of-middles for even counts).
inline double default_horizon(const SurvivalDataset& data) {
  std::vector<double> event_times;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.events[i]) event_times.push_back(data.times[i]);
  if (event_times.empty())
    throw ContractError("default_horizon: dataset has no events");
  std::sort(event_times.begin(), event_times.end());
  const std::size_t m = event_times.size();
  if (m % 2 == 1) return event_times[m / 2];
  return 0.5 * (event_times[m / 2 - 1] + event_times[m / 2]);
}

/// Ranking scores for concordance: predicted median survival time for AFT
/// models; the negated linear predictor for Cox (strictly monotone in the
/// predicted median, without step-function ties at infinity).
inline math::Vector concordance_scores(const AftModel& m, const SurvivalDataset& data) {
  math::Vector scores(data.n(), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    double lp = m.theta[0];
    const double* row = data.design.row(i);
    for (std::size_t j = 0; j < data.p(); ++j) lp += m.theta[j + 1] * row[j];
    scores[i] = median_survival(m.family, m.shape, lp);
  }
  return scores;
}

inline math::Vector concordance_scores(const CoxModel& m, const SurvivalDataset& data) {
  math::Vector scores(data.n(), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i)
    scores[i] = -math::dot_row(data.design, i, m.theta);
  return scores;
}

/// The Table-1 metric block for one model on a train/test pair.
struct ValidationReport {
  std::string model_name;
  std::optional<double> aic;  // absent for Cox (partial likelihood)
  std::optional<double> bic;
  double concordance_train = math::nan;
  double concordance_test = math::nan;
  double ici_train = math::nan;
  double ici_test = math::nan;
  double e50_train = math::nan;
  double e50_test = math::nan;
  std::vector<CalibrationPoint> calibration_train;
  std::vector<CalibrationPoint> calibration_test;
  // Filled by the reporting layer (observed, theoretical) quantile pairs.
  std::vector<std::pair<double, double>> qq_train;
  std::vector<std::pair<double, double>> qq_test;
  double horizon = math::nan;
  int knots = 5;
  std::size_t excluded_censored_train = 0;
  std::size_t excluded_censored_test = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

namespace detail {

template <typename Model>
ValidationReport validate_impl(const Model& model, const SurvivalDataset& train,
                               const SurvivalDataset* test, double horizon,
                               int knots) {
  ValidationReport rep;
  rep.horizon = horizon;
  rep.knots = knots;
  rep.n_train = train.n();
  rep.n_test = test ? test->n() : 0;

  rep.concordance_train =
      concordance(concordance_scores(model, train), train.times, train.events);
  const CalibrationCurve curve_tr = calibration_curve(model, train, horizon, knots);
  rep.calibration_train = curve_tr.points;
  rep.excluded_censored_train = curve_tr.excluded_censored;
  std::tie(rep.ici_train, rep.e50_train) = ici_and_e50(curve_tr.points);

  if (test && test->n() > 0) {
    rep.concordance_test =
        concordance(concordance_scores(model, *test), test->times, test->events);
    const CalibrationCurve curve_te = calibration_curve(model, *test, horizon, knots);
    rep.calibration_test = curve_te.points;
    rep.excluded_censored_test = curve_te.excluded_censored;
    std::tie(rep.ici_test, rep.e50_test) = ici_and_e50(curve_te.points);
  }
  return rep;
}

}  // namespace detail

inline ValidationReport validate_model(const AftModel& model,
                                       const SurvivalDataset& train,
                                       const SurvivalDataset* test,
                                       double horizon, int knots = 5) {
  ValidationReport rep = detail::validate_impl(model, train, test, horizon, knots);
  rep.model_name = to_string(model.family);
  rep.aic = aic(model);
  rep.bic = bic(model, train.n());
  return rep;
}

inline ValidationReport validate_model(const CoxModel& model,
                                       const SurvivalDataset& train,
                                       const SurvivalDataset* test,
                                       double horizon, int knots = 5) {
  ValidationReport rep = detail::validate_impl(model, train, test, horizon, knots);
  rep.model_name = "cox";
  return rep;
}

// --- report.json round trip -------------------------------------------------

inline nlohmann::json report_to_json(const ValidationReport& r) {
  nlohmann::json j;
  j["model"] = r.model_name;
  j["aic"] = r.aic ? nlohmann::json(*r.aic) : nlohmann::json(nullptr);
  j["bic"] = r.bic ? nlohmann::json(*r.bic) : nlohmann::json(nullptr);
  j["concordance_train"] = r.concordance_train;
  j["concordance_test"] =
      r.n_test > 0 ? nlohmann::json(r.concordance_test) : nlohmann::json(nullptr);
  j["ici_train"] = r.ici_train;
  j["ici_test"] = r.n_test > 0 ? nlohmann::json(r.ici_test) : nlohmann::json(nullptr);
  j["e50_train"] = r.e50_train;
  j["e50_test"] = r.n_test > 0 ? nlohmann::json(r.e50_test) : nlohmann::json(nullptr);
  auto curve_json = [](const std::vector<CalibrationPoint>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back({p.predicted, p.observed});
    return arr;
  };
  j["calibration_train"] = curve_json(r.calibration_train);
  j["calibration_test"] = curve_json(r.calibration_test);
  auto qq_json = [](const std::vector<std::pair<double, double>>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [obs, theo] : pts) arr.push_back({obs, theo});
    return arr;
  };
  j["qq_train"] = qq_json(r.qq_train);
  j["qq_test"] = qq_json(r.qq_test);
  j["horizon"] = r.horizon;
  j["knots"] = r.knots;
  j["excluded_censored_train"] = r.excluded_censored_train;
  j["excluded_censored_test"] = r.excluded_censored_test;
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  return j;
}

inline ValidationReport report_from_json(const nlohmann::json& j) {
  ValidationReport r;
  r.model_name = j.at("model").get<std::string>();
  if (!j.at("aic").is_null()) r.aic = j.at("aic").get<double>();
  if (!j.at("bic").is_null()) r.bic = j.at("bic").get<double>();
  r.concordance_train = j.at("concordance_train").get<double>();
  if (!j.at("concordance_test").is_null())
    r.concordance_test = j.at("concordance_test").get<double>();
  r.ici_train = j.at("ici_train").get<double>();
  if (!j.at("ici_test").is_null()) r.ici_test = j.at("ici_test").get<double>();
  r.e50_train = j.at("e50_train").get<double>();
  if (!j.at("e50_test").is_null()) r.e50_test = j.at("e50_test").get<double>();
  auto curve = [](const nlohmann::json& arr) {
    std::vector<CalibrationPoint> pts;
    for (const auto& p : arr)
      pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return pts;
  };
  r.calibration_train = curve(j.at("calibration_train"));
  r.calibration_test = curve(j.at("calibration_test"));
  auto qq = [](const nlohmann::json& arr) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : arr)
      pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return pts;
  };
  r.qq_train = qq(j.at("qq_train"));
  r.qq_test = qq(j.at("qq_test"));
  r.horizon = j.at("horizon").get<double>();
  r.knots = j.at("knots").get<int>();
  r.excluded_censored_train = j.at("excluded_censored_train").get<std::size_t>();
  r.excluded_censored_test = j.at("excluded_censored_test").get<std::size_t>();
  r.n_train = j.at("n_train").get<std::size_t>();
  r.n_test = j.at("n_test").get<std::size_t>();
  return r;
}

}  // namespace trashfire
