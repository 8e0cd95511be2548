#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "trashfire/error.hpp"
#include "trashfire/math/linalg.hpp"
#include "trashfire/record.hpp"
#include "trashfire/rng.hpp"

namespace trashfire {

enum class SplitTag { train, test, full };

inline const char* to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::train: return "train";
    case SplitTag::test: return "test";
    default: return "full";
  }
}

/// Min-max bounds for one attack/defence level, computed on the train split.
struct StrengthScale {
  double lo = 0.0;
  double hi = 1.0;
};

/// Centering/scaling statistics for one continuous column (train split).
/// `sd` is the population standard deviation, replaced by 1 when the column
/// has zero variance.
struct ZScale {
  double mean = 0.0;
  double sd = 1.0;
};

/// Names of the centered/scaled continuous covariates, in design order
/// (they follow the two strength columns).
inline const std::array<const char*, 6>& continuous_covariates() {
  static const std::array<const char*, 6> names = {
      "layers", "epochs", "t_train", "t_predict", "acc_ben", "acc_adv"};
  return names;
}

/// Every transform applied by `encode`, sufficient to re-encode new records
/// with train statistics and to decode strengths back to their raw scale.
struct EncodingMeta {
  // Sorted level sets from the train split; the first entry of each is the
  // reference level (no dummy column).
  std::vector<std::string> dataset_levels;
  std::vector<std::string> attack_levels;
  std::vector<std::string> defence_levels;

  std::map<std::string, StrengthScale> attack_scale;   // keyed by attack level
  std::map<std::string, StrengthScale> defence_scale;  // keyed by defence level
  StrengthScale attack_fallback;   // global train bounds, for unseen levels
  StrengthScale defence_fallback;

  std::array<ZScale, 6> continuous{};  // aligned with continuous_covariates()

  std::vector<std::string> feature_names() const {
    std::vector<std::string> names = {"attack_strength", "defence_strength"};
    for (const char* c : continuous_covariates()) names.emplace_back(c);
    for (std::size_t i = 1; i < dataset_levels.size(); ++i)
      names.push_back("dataset=" + dataset_levels[i]);
    for (std::size_t i = 1; i < attack_levels.size(); ++i)
      names.push_back("attack=" + attack_levels[i]);
    for (std::size_t i = 1; i < defence_levels.size(); ++i)
      names.push_back("defence=" + defence_levels[i]);
    return names;
  }

  std::size_t feature_count() const { return feature_names().size(); }

  /// Index of the first dummy column.
  std::size_t dummy_offset() const { return 2 + continuous_covariates().size(); }
};

/// Encoded design matrix plus survival outcome, one split of the log.
struct SurvivalDataset {
  math::Matrix design;
  std::vector<double> times;
  std::vector<std::uint8_t> events;
  std::vector<std::string> feature_names;
  EncodingMeta meta;
  SplitTag split_tag = SplitTag::full;

  // Row-aligned raw values kept for conditioning and decoding.
  std::vector<std::size_t> source_rows;  // indices into the parsed record list
  std::vector<double> raw_attack_strength;
  std::vector<double> raw_defence_strength;
  std::vector<double> raw_t_train;

  std::vector<std::string> warnings;

  std::size_t n() const { return times.size(); }
  std::size_t p() const { return design.cols(); }
  std::size_t n_events() const {
    return static_cast<std::size_t>(
        std::count(events.begin(), events.end(), std::uint8_t{1}));
  }
  math::Vector row(std::size_t i) const {
    return math::Vector(design.row(i), design.row(i) + design.cols());
  }
};

namespace detail {

inline double minmax_apply(double v, const StrengthScale& s) {
  if (!(s.hi > s.lo)) return 0.0;  // degenerate level: constant strength
  return (v - s.lo) / (s.hi - s.lo);
}

inline std::vector<std::string> sorted_levels(
    const std::vector<ExperimentRecord>& records,
    const std::vector<std::size_t>& rows,
    std::string ExperimentRecord::*field) {
  std::set<std::string> levels;
  for (std::size_t i : rows) levels.insert(records[i].*field);
  return {levels.begin(), levels.end()};
}

}  // namespace detail

/// Computes the full transform record from the given (train) rows.
inline EncodingMeta build_encoding(const std::vector<ExperimentRecord>& records,
                                   const std::vector<std::size_t>& rows,
                                   std::vector<std::string>* warnings = nullptr) {
  if (rows.empty()) throw ContractError("build_encoding: no rows");
  EncodingMeta meta;
  meta.dataset_levels = detail::sorted_levels(records, rows, &ExperimentRecord::dataset);
  meta.attack_levels = detail::sorted_levels(records, rows, &ExperimentRecord::attack);
  meta.defence_levels = detail::sorted_levels(records, rows, &ExperimentRecord::defence);

  auto strength_scales = [&](std::string ExperimentRecord::*level,
                             double ExperimentRecord::*value,
                             std::map<std::string, StrengthScale>& out,
                             StrengthScale& fallback) {
    bool first_global = true;
    for (std::size_t i : rows) {
      const std::string& lv = records[i].*level;
      const double v = records[i].*value;
      auto [it, inserted] = out.emplace(lv, StrengthScale{v, v});
      if (!inserted) {
        it->second.lo = std::min(it->second.lo, v);
        it->second.hi = std::max(it->second.hi, v);
      }
      if (first_global) {
        fallback = {v, v};
        first_global = false;
      } else {
        fallback.lo = std::min(fallback.lo, v);
        fallback.hi = std::max(fallback.hi, v);
      }
    }
  };
  strength_scales(&ExperimentRecord::attack, &ExperimentRecord::attack_strength,
                  meta.attack_scale, meta.attack_fallback);
  strength_scales(&ExperimentRecord::defence, &ExperimentRecord::defence_strength,
                  meta.defence_scale, meta.defence_fallback);

  const auto value_of = [](const ExperimentRecord& r, std::size_t j) -> double {
    switch (j) {
      case 0: return static_cast<double>(r.layers);
      case 1: return static_cast<double>(r.epochs);
      case 2: return r.t_train;
      case 3: return r.t_predict;
      case 4: return r.acc_ben;
      default: return r.acc_adv;
    }
  };
  const double n = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < continuous_covariates().size(); ++j) {
    double mean = 0.0;
    double lo = value_of(records[rows.front()], j);
    double hi = lo;
    for (std::size_t i : rows) {
      const double v = value_of(records[i], j);
      mean += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    mean /= n;
    double var = 0.0;
    for (std::size_t i : rows) {
      const double d = value_of(records[i], j) - mean;
      var += d * d;
    }
    var /= n;
    double sd = std::sqrt(var);
    // A constant column's two-pass variance can come out as rounding noise
    // instead of exactly zero; the min==max test is exact.
    if (!(sd > 0.0) || lo == hi) {
      mean = lo == hi ? lo : mean;
      sd = 1.0;
      if (warnings)
        warnings->push_back(std::string("zero-variance column '") +
                            continuous_covariates()[j] + "' scaled by 1");
    }
    meta.continuous[j] = {mean, sd};
  }
  return meta;
}

/// Encodes `rows` of `records` with a previously computed transform record.
/// Levels absent from the meta get all-zero dummies and fallback strength
/// scaling, each with a warning.
inline SurvivalDataset apply_encoding(const std::vector<ExperimentRecord>& records,
                                      const std::vector<std::size_t>& rows,
                                      const EncodingMeta& meta, SplitTag tag) {
  SurvivalDataset ds;
  ds.meta = meta;
  ds.split_tag = tag;
  ds.feature_names = meta.feature_names();
  const std::size_t p = ds.feature_names.size();
  ds.design = math::Matrix(rows.size(), p, 0.0);
  ds.times.reserve(rows.size());
  ds.events.reserve(rows.size());
  ds.source_rows = rows;

  std::set<std::string> warned;
  auto warn_once = [&](const std::string& msg) {
    if (warned.insert(msg).second) ds.warnings.push_back(msg);
  };

  auto dummy_index = [](const std::vector<std::string>& levels,
                        const std::string& lv) -> std::ptrdiff_t {
    const auto it = std::lower_bound(levels.begin(), levels.end(), lv);
    if (it == levels.end() || *it != lv) return -1;  // unseen level
    return it - levels.begin();                      // 0 means reference
  };

  const std::size_t n_dataset = meta.dataset_levels.size();
  const std::size_t n_attack = meta.attack_levels.size();
  const std::size_t dummies = meta.dummy_offset();

  for (std::size_t out_i = 0; out_i < rows.size(); ++out_i) {
    const ExperimentRecord& r = records[rows[out_i]];
    double* row = ds.design.row(out_i);

    const auto att_it = meta.attack_scale.find(r.attack);
    if (att_it == meta.attack_scale.end())
      warn_once("attack level '" + r.attack +
                "' not in training encoding; using global strength bounds");
    row[0] = detail::minmax_apply(
        r.attack_strength,
        att_it != meta.attack_scale.end() ? att_it->second : meta.attack_fallback);

    const auto def_it = meta.defence_scale.find(r.defence);
    if (def_it == meta.defence_scale.end())
      warn_once("defence level '" + r.defence +
                "' not in training encoding; using global strength bounds");
    row[1] = detail::minmax_apply(
        r.defence_strength,
        def_it != meta.defence_scale.end() ? def_it->second : meta.defence_fallback);

    const double cont[6] = {static_cast<double>(r.layers),
                            static_cast<double>(r.epochs),
                            r.t_train,
                            r.t_predict,
                            r.acc_ben,
                            r.acc_adv};
    for (std::size_t j = 0; j < 6; ++j)
      row[2 + j] = (cont[j] - meta.continuous[j].mean) / meta.continuous[j].sd;

    auto set_dummy = [&](const std::vector<std::string>& levels,
                         const std::string& lv, std::size_t base,
                         const char* what) {
      const std::ptrdiff_t idx = dummy_index(levels, lv);
      if (idx < 0) {
        warn_once(std::string(what) + " level '" + lv +
                  "' not in training encoding; emitting all-zero dummies");
        return;
      }
      if (idx > 0) row[base + static_cast<std::size_t>(idx) - 1] = 1.0;
    };
    set_dummy(meta.dataset_levels, r.dataset, dummies, "dataset");
    set_dummy(meta.attack_levels, r.attack, dummies + (n_dataset - 1), "attack");
    set_dummy(meta.defence_levels, r.defence,
              dummies + (n_dataset - 1) + (n_attack - 1), "defence");

    ds.times.push_back(r.t_attack);
    ds.events.push_back(r.event ? 1 : 0);
    ds.raw_attack_strength.push_back(r.attack_strength);
    ds.raw_defence_strength.push_back(r.defence_strength);
    ds.raw_t_train.push_back(r.t_train);
  }
  return ds;
}

inline SurvivalDataset apply_encoding(const std::vector<ExperimentRecord>& records,
                                      const EncodingMeta& meta, SplitTag tag) {
  std::vector<std::size_t> rows(records.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return apply_encoding(records, rows, meta, tag);
}

/// Deterministic shuffle-and-split of row indices: Fisher-Yates under
/// `seed`, then the first (1 - test_fraction) share goes to train. The test
/// share is rounded to the nearest count but never exhausts the train side.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(
    std::size_t n, std::uint64_t seed, double test_fraction) {
  if (n == 0) throw ContractError("split_rows: no records");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ContractError("split_rows: test_fraction must lie in (0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  std::size_t n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  if (n_test >= n) n_test = n - 1;
  const std::size_t n_train = n - n_test;
  return {std::vector<std::size_t>(order.begin(),
                                   order.begin() + static_cast<std::ptrdiff_t>(n_train)),
          std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                                   order.end())};
}

/// Shuffles (Fisher-Yates under `seed`), splits, and encodes an experiment
/// log. All statistics are computed on the train split only; the test split
/// reuses them through the shared EncodingMeta.
inline std::pair<SurvivalDataset, SurvivalDataset> encode(
    const std::vector<ExperimentRecord>& records, std::uint64_t seed,
    double test_fraction) {
  auto [train_rows, test_rows] = split_rows(records.size(), seed, test_fraction);

  std::vector<std::string> meta_warnings;
  const EncodingMeta meta = build_encoding(records, train_rows, &meta_warnings);
  SurvivalDataset train = apply_encoding(records, train_rows, meta, SplitTag::train);
  SurvivalDataset test = apply_encoding(records, test_rows, meta, SplitTag::test);
  train.warnings.insert(train.warnings.begin(), meta_warnings.begin(), meta_warnings.end());
  return {std::move(train), std::move(test)};
}

/// Reconstructs the raw (attack_strength, defence_strength) of a row from
/// its encoded values and the dataset's transform record.
inline std::pair<double, double> decode_strengths(const SurvivalDataset& ds,
                                                  std::size_t row) {
  if (row >= ds.n()) throw ContractError("decode_strengths: row out of range");
  const EncodingMeta& meta = ds.meta;
  const double* r = ds.design.row(row);
  const std::size_t base = meta.dummy_offset();
  const std::size_t nd = meta.dataset_levels.size();
  const std::size_t na = meta.attack_levels.size();

  auto level_of = [&](const std::vector<std::string>& levels, std::size_t offset) {
    for (std::size_t i = 1; i < levels.size(); ++i)
      if (r[offset + i - 1] == 1.0) return levels[i];
    return levels.front();
  };
  const std::string attack = level_of(meta.attack_levels, base + nd - 1);
  const std::string defence = level_of(meta.defence_levels, base + nd - 1 + na - 1);

  auto invert = [](double scaled, const StrengthScale& s) {
    if (!(s.hi > s.lo)) return s.lo;
    return s.lo + scaled * (s.hi - s.lo);
  };
  const auto att = meta.attack_scale.find(attack);
  const auto def = meta.defence_scale.find(defence);
  return {invert(r[0], att != meta.attack_scale.end() ? att->second : meta.attack_fallback),
          invert(r[1], def != meta.defence_scale.end() ? def->second : meta.defence_fallback)};
}

// --- JSON round trip for the transform record (embedded in model files) ---

inline nlohmann::json meta_to_json(const EncodingMeta& meta) {
  nlohmann::json j;
  j["dataset_levels"] = meta.dataset_levels;
  j["attack_levels"] = meta.attack_levels;
  j["defence_levels"] = meta.defence_levels;
  auto scales = [](const std::map<std::string, StrengthScale>& m) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : m) out[k] = {{"lo", v.lo}, {"hi", v.hi}};
    return out;
  };
  j["attack_scale"] = scales(meta.attack_scale);
  j["defence_scale"] = scales(meta.defence_scale);
  j["attack_fallback"] = {{"lo", meta.attack_fallback.lo}, {"hi", meta.attack_fallback.hi}};
  j["defence_fallback"] = {{"lo", meta.defence_fallback.lo}, {"hi", meta.defence_fallback.hi}};
  nlohmann::json cont = nlohmann::json::object();
  for (std::size_t i = 0; i < continuous_covariates().size(); ++i)
    cont[continuous_covariates()[i]] = {{"mean", meta.continuous[i].mean},
                                        {"sd", meta.continuous[i].sd}};
  j["continuous"] = cont;
  return j;
}

inline EncodingMeta meta_from_json(const nlohmann::json& j) {
  EncodingMeta meta;
  meta.dataset_levels = j.at("dataset_levels").get<std::vector<std::string>>();
  meta.attack_levels = j.at("attack_levels").get<std::vector<std::string>>();
  meta.defence_levels = j.at("defence_levels").get<std::vector<std::string>>();
  auto scales = [](const nlohmann::json& o) {
    std::map<std::string, StrengthScale> m;
    for (auto it = o.begin(); it != o.end(); ++it)
      m.emplace(it.key(), StrengthScale{it.value().at("lo").get<double>(),
                                        it.value().at("hi").get<double>()});
    return m;
  };
  meta.attack_scale = scales(j.at("attack_scale"));
  meta.defence_scale = scales(j.at("defence_scale"));
  meta.attack_fallback = {j.at("attack_fallback").at("lo").get<double>(),
                          j.at("attack_fallback").at("hi").get<double>()};
  meta.defence_fallback = {j.at("defence_fallback").at("lo").get<double>(),
                           j.at("defence_fallback").at("hi").get<double>()};
  for (std::size_t i = 0; i < continuous_covariates().size(); ++i) {
    const auto& c = j.at("continuous").at(continuous_covariates()[i]);
    meta.continuous[i] = {c.at("mean").get<double>(), c.at("sd").get<double>()};
  }
  return meta;
}

}  // namespace trashfire
