#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "trashfire/dataset.hpp"
#include "trashfire/error.hpp"
#include "trashfire/math/spline.hpp"
#include "trashfire/model.hpp"
#include "trashfire/parse.hpp"
#include "trashfire/svg.hpp"
#include "trashfire/validate.hpp"

namespace trashfire {

using AnyModel = std::variant<AftModel, CoxModel>;

inline std::string family_label(const AnyModel& m) {
  if (std::holds_alternative<CoxModel>(m)) return "cox";
  return to_string(std::get<AftModel>(m).family);
}

// ---------------------------------------------------------------------------
// Comparison table (one row per model, the Table-1 column set)
// ---------------------------------------------------------------------------

struct ComparisonRow {
  std::string name;
  std::string family;
  std::optional<double> aic;  // empty for Cox rows
  std::optional<double> bic;
  double concordance = math::nan;
  double test_concordance = math::nan;
  double ici = math::nan;
  double test_ici = math::nan;
  double e50 = math::nan;
  double test_e50 = math::nan;
};

inline std::vector<ComparisonRow> model_comparison_table(
    const std::vector<std::pair<std::string, AnyModel>>& models,
    const std::vector<ValidationReport>& reports) {
  if (models.empty()) throw ContractError("model_comparison_table: no models");
  if (models.size() != reports.size())
    throw ContractError("model_comparison_table: one report per model required");
  std::set<std::string> seen;
  for (const auto& [name, model] : models)
    if (!seen.insert(name).second)
      throw ContractError("model_comparison_table: duplicate model name '" + name + "'");

  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const ValidationReport& rep = reports[i];
    ComparisonRow row;
    row.name = models[i].first;
    row.family = family_label(models[i].second);
    row.aic = rep.aic;
    row.bic = rep.bic;
    row.concordance = rep.concordance_train;
    row.test_concordance = rep.concordance_test;
    row.ici = rep.ici_train;
    row.test_ici = rep.ici_test;
    row.e50 = rep.e50_train;
    row.test_e50 = rep.e50_test;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string comparison_table_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "name,family,aic,bic,concordance,test_concordance,ici,test_ici,e50,test_e50\n";
  auto cell = [](std::optional<double> v) {
    return v ? format_double(*v) : std::string("--");
  };
  auto num = [](double v) {
    return std::isfinite(v) ? format_double(v) : std::string("--");
  };
  for (const auto& r : rows) {
    out << r.name << ',' << r.family << ',' << cell(r.aic) << ',' << cell(r.bic)
        << ',' << num(r.concordance) << ',' << num(r.test_concordance) << ','
        << num(r.ici) << ',' << num(r.test_ici) << ',' << num(r.e50) << ','
        << num(r.test_e50) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Coefficient (forest-plot) data
// ---------------------------------------------------------------------------

struct CoefficientEntry {
  std::string feature;
  double coefficient = 0.0;
  double lower = math::nan;
  double upper = math::nan;
  bool interval_available = false;
};

namespace detail {

inline constexpr double z_95 = 1.96;  // normal-approximation 95% interval

inline std::vector<CoefficientEntry> coefficient_entries(
    const std::vector<std::string>& labels, const std::vector<double>& values,
    const std::vector<double>& ses) {
  std::vector<CoefficientEntry> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    CoefficientEntry e;
    e.feature = labels[i];
    e.coefficient = values[i];
    if (i < ses.size() && std::isfinite(ses[i])) {
      e.lower = values[i] - z_95 * ses[i];
      e.upper = values[i] + z_95 * ses[i];
      e.interval_available = true;
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const CoefficientEntry& a, const CoefficientEntry& b) {
    if (a.coefficient != b.coefficient) return a.coefficient < b.coefficient;
    return a.feature < b.feature;
  });
  return out;
}

}  // namespace detail

/// Per-parameter coefficients with 95% normal-approximation intervals,
/// sorted by coefficient. Rows without a usable standard error (singular
/// information, zero-variance feature) are flagged interval-unavailable.
inline std::vector<CoefficientEntry> coefficient_plot_data(const AftModel& m) {
  std::vector<std::string> labels = {"(intercept)"};
  labels.insert(labels.end(), m.feature_names.begin(), m.feature_names.end());
  return detail::coefficient_entries(labels, m.theta, m.standard_errors);
}

inline std::vector<CoefficientEntry> coefficient_plot_data(const CoxModel& m) {
  return detail::coefficient_entries(m.feature_names, m.theta, m.standard_errors);
}

inline std::vector<CoefficientEntry> coefficient_plot_data(const AnyModel& m) {
  if (std::holds_alternative<CoxModel>(m))
    return coefficient_plot_data(std::get<CoxModel>(m));
  return coefficient_plot_data(std::get<AftModel>(m));
}

inline std::string coefficients_csv(const std::vector<CoefficientEntry>& entries) {
  std::ostringstream out;
  out << "feature,coefficient,lower95,upper95,interval_available\n";
  for (const auto& e : entries) {
    out << e.feature << ',' << format_double(e.coefficient) << ',';
    if (e.interval_available)
      out << format_double(e.lower) << ',' << format_double(e.upper) << ",true\n";
    else
      out << "--,--,false\n";
  }
  return out.str();
}

inline std::string coefficients_svg(const std::vector<CoefficientEntry>& entries,
                                    const std::string& title) {
  std::vector<svg::ForestRow> rows;
  for (const auto& e : entries)
    rows.push_back({e.feature, e.coefficient, e.lower, e.upper, e.interval_available});
  return svg::forest(rows, title);
}

// ---------------------------------------------------------------------------
// QQ calibration data (Cox-Snell residuals on the probability scale)
// ---------------------------------------------------------------------------

/// Per-event probability residuals u_i = F(t_i | x_i): the Cox-Snell
/// residual mapped through the unit-exponential CDF. Uniform on (0,1) under
/// a correctly specified model.
inline std::vector<double> probability_residuals(const AftModel& m,
                                                 const SurvivalDataset& data,
                                                 double window_lo = 0.0,
                                                 double window_hi = math::inf) {
  std::vector<double> u;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (!data.events[i]) continue;
    if (data.times[i] < window_lo || data.times[i] > window_hi) continue;
    double lp = m.theta[0];
    const double* row = data.design.row(i);
    for (std::size_t j = 0; j < data.p(); ++j) lp += m.theta[j + 1] * row[j];
    u.push_back(-std::expm1(log_survival(m.family, m.shape, lp, data.times[i])));
  }
  return u;
}

inline std::vector<double> probability_residuals(const CoxModel& m,
                                                 const SurvivalDataset& data,
                                                 double window_lo = 0.0,
                                                 double window_hi = math::inf) {
  std::vector<double> u;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (!data.events[i]) continue;
    if (data.times[i] < window_lo || data.times[i] > window_hi) continue;
    const double hr = std::exp(math::dot_row(data.design, i, m.theta));
    u.push_back(-std::expm1(-cox_baseline_cumulative_hazard(m, data.times[i]) * hr));
  }
  return u;
}

/// (observed quantile, theoretical quantile) pairs on a probability grid
/// p_k = k/(grid-1); grid=2 gives exactly the endpoints. The optional time
/// window restricts which events enter the sample.
template <typename Model>
std::vector<std::pair<double, double>> qq_calibration_data(
    const Model& m, const SurvivalDataset& data, int grid,
    double window_lo = 0.0, double window_hi = math::inf) {
  if (grid < 2) throw ContractError("qq_calibration_data: grid >= 2 required");
  std::vector<double> u = probability_residuals(m, data, window_lo, window_hi);
  if (u.empty())
    throw ContractError("qq_calibration_data: no events in the requested window");
  std::sort(u.begin(), u.end());
  std::vector<std::pair<double, double>> points;
  points.reserve(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(grid - 1);
    points.emplace_back(math::quantile_sorted(u, p), p);
  }
  return points;
}

inline std::string qq_csv(const std::vector<std::pair<double, double>>& train,
                          const std::vector<std::pair<double, double>>& test) {
  std::ostringstream out;
  out << "split,observed_quantile,theoretical_quantile\n";
  for (const auto& [obs, theo] : train)
    out << "train," << format_double(obs) << ',' << format_double(theo) << '\n';
  for (const auto& [obs, theo] : test)
    out << "test," << format_double(obs) << ',' << format_double(theo) << '\n';
  return out.str();
}

inline std::string qq_svg(const std::vector<std::pair<double, double>>& train,
                          const std::vector<std::pair<double, double>>& test,
                          const std::string& /*title*/) {
  std::vector<svg::Series> series;
  svg::Series tr;
  tr.points = train;
  tr.color = "steelblue";
  tr.label = "train";
  series.push_back(std::move(tr));
  if (!test.empty()) {
    svg::Series te;
    te.points = test;
    te.color = "firebrick";
    te.label = "test";
    series.push_back(std::move(te));
  }
  return svg::scatter_with_diagonal(series, "observed quantile", "theoretical quantile");
}

// ---------------------------------------------------------------------------
// TRASH summary artifacts
// ---------------------------------------------------------------------------

struct TrashSummaryRow {
  std::string name;
  double t_train = 0.0;
  double expected_survival = 0.0;
  double trash_score = 0.0;
  bool broken = false;
};

inline std::string trash_csv(const std::vector<TrashSummaryRow>& rows) {
  std::ostringstream out;
  out << "name,t_train,expected_survival,trash_score,verdict\n";
  for (const auto& r : rows)
    out << r.name << ',' << format_double(r.t_train) << ','
        << format_double(r.expected_survival) << ',' << format_double(r.trash_score)
        << ',' << (r.broken ? "broken" : "not-broken") << '\n';
  return out.str();
}

inline std::string trash_svg(const std::vector<TrashSummaryRow>& rows) {
  std::vector<std::pair<std::string, double>> bars;
  for (const auto& r : rows) bars.emplace_back(r.name, r.trash_score);
  return svg::bars_with_threshold(bars, 1.0, "training rate vs expected survival");
}

}  // namespace trashfire
