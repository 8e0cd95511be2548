#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "trashfire/dataset.hpp"
#include "trashfire/error.hpp"
#include "trashfire/math/special.hpp"
#include "trashfire/math/spline.hpp"
#include "trashfire/model.hpp"

namespace trashfire {

struct CalibrationPoint {
  double predicted = 0.0;
  double observed = 0.0;
};

struct CalibrationCurve {
  std::vector<CalibrationPoint> points;  // sorted by predicted
  std::size_t excluded_censored = 0;     // censored before the horizon
  double horizon = 0.0;
  int knots = 0;
};

namespace detail {

/// Smoothed calibration against the at-horizon event indicator: restricted
/// cubic splines on the logit of the predicted failure probability, fitted
/// by lightly penalized least squares. Records censored before the horizon
/// carry no event status there and are excluded (counted).
inline CalibrationCurve calibration_curve_impl(
    const std::function<double(std::size_t)>& predicted_failure,
    const SurvivalDataset& data, double horizon, int knots) {
  if (knots < 3) throw ContractError("calibration_curve: need >= 3 knots");
  if (!(horizon > 0.0)) throw DomainError("calibration_curve: horizon must be > 0");

  bool any_event_before = false;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.events[i] && data.times[i] <= horizon) {
      any_event_before = true;
      break;
    }
  if (!any_event_before)
    throw ContractError("calibration_curve: no events at or before the horizon");

  CalibrationCurve curve;
  curve.horizon = horizon;
  curve.knots = knots;

  std::vector<double> pred, lgt, y;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const bool failed_by_horizon = data.times[i] <= horizon;
    if (failed_by_horizon && !data.events[i]) {
      ++curve.excluded_censored;  // status at the horizon is unknown
      continue;
    }
    double pr = predicted_failure(i);
    pr = std::clamp(pr, 1e-12, 1.0 - 1e-12);
    pred.push_back(pr);
    lgt.push_back(math::logit(pr));
    y.push_back(failed_by_horizon ? 1.0 : 0.0);
  }
  if (pred.empty())
    throw ContractError("calibration_curve: no usable records at the horizon");

  const auto [mn, mx] = std::minmax_element(pred.begin(), pred.end());
  if (*mx - *mn < 1e-12)
    throw ContractError("calibration_curve: all predictions identical "
                        "(degenerate curve)");

  std::vector<double> sorted_lgt = lgt;
  std::sort(sorted_lgt.begin(), sorted_lgt.end());
  std::vector<double> knot_pos;
  for (double q : math::rcs_knot_quantiles(knots))
    knot_pos.push_back(math::quantile_sorted(sorted_lgt, q));
  knot_pos.erase(std::unique(knot_pos.begin(), knot_pos.end(),
                             [](double a, double b) { return std::fabs(a - b) < 1e-9; }),
                 knot_pos.end());
  if (knot_pos.size() < 3)
    throw ContractError("calibration_curve: fewer than 3 distinct knots "
                        "(degenerate curve)");

  const math::Vector coef =
      math::rcs_fit(lgt, y, knot_pos, 1e-8 * static_cast<double>(lgt.size()));

  curve.points.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double smoothed =
        std::clamp(math::rcs_eval(lgt[i], knot_pos, coef), 0.0, 1.0);
    curve.points.push_back({pred[i], smoothed});
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const CalibrationPoint& a, const CalibrationPoint& b) {
              if (a.predicted != b.predicted) return a.predicted < b.predicted;
              return a.observed < b.observed;
            });
  return curve;
}

}  // namespace detail

inline CalibrationCurve calibration_curve(const AftModel& m,
                                          const SurvivalDataset& data,
                                          double horizon, int knots = 5) {
  if (m.covariate_count() != data.p())
    throw ContractError("calibration_curve: model/dataset feature mismatch");
  return detail::calibration_curve_impl(
      [&](std::size_t i) {
        double lp = m.theta[0];
        const double* row = data.design.row(i);
        for (std::size_t j = 0; j < data.p(); ++j) lp += m.theta[j + 1] * row[j];
        return -std::expm1(log_survival(m.family, m.shape, lp, horizon));
      },
      data, horizon, knots);
}

inline CalibrationCurve calibration_curve(const CoxModel& m,
                                          const SurvivalDataset& data,
                                          double horizon, int knots = 5) {
  return detail::calibration_curve_impl(
      [&](std::size_t i) {
        const double hr = std::exp(math::dot_row(data.design, i, m.theta));
        const double h0 = cox_baseline_cumulative_hazard(m, horizon);
        return -std::expm1(-h0 * hr);
      },
      data, horizon, knots);
}

/// ICI (mean absolute gap) and E50 (gap at the median predicted
/// probability, lower median for even counts). `points` must be the curve's
/// sorted-by-predicted samples.
inline std::pair<double, double> ici_and_e50(const std::vector<CalibrationPoint>& points) {
  if (points.empty()) throw ContractError("ici_and_e50: empty curve");
  double ici = 0.0;
  for (const auto& p : points) ici += std::fabs(p.predicted - p.observed);
  ici /= static_cast<double>(points.size());
  const CalibrationPoint& mid = points[(points.size() - 1) / 2];
  const double e50 = std::fabs(mid.predicted - mid.observed);
  return {ici, e50};
}

}  // namespace trashfire
