#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trashfire/dataset.hpp"
#include "trashfire/error.hpp"
#include "trashfire/family.hpp"
#include "trashfire/math/spline.hpp"
#include "trashfire/record.hpp"
#include "trashfire/rng.hpp"

namespace trashfire {

/// Sampler for one record field: a uniform range, a weighted categorical,
/// or a constant.
struct CovariateSampler {
  enum class Kind { uniform, categorical, constant };
  Kind kind = Kind::constant;
  double lo = 0.0, hi = 1.0;                            // uniform
  std::vector<std::pair<std::string, double>> levels;   // categorical (label, weight)
  double value = 0.0;                                   // constant
  std::string label;                                    // constant (string fields)

  static CovariateSampler uniform_range(double lo, double hi) {
    CovariateSampler s;
    s.kind = Kind::uniform;
    s.lo = lo;
    s.hi = hi;
    return s;
  }
  static CovariateSampler categorical(std::vector<std::pair<std::string, double>> levels) {
    CovariateSampler s;
    s.kind = Kind::categorical;
    s.levels = std::move(levels);
    return s;
  }
  static CovariateSampler constant(double v) {
    CovariateSampler s;
    s.value = v;
    return s;
  }
  static CovariateSampler constant_label(std::string l) {
    CovariateSampler s;
    s.label = std::move(l);
    return s;
  }
};

struct CensoringRule {
  enum class Kind { none, budget, quantile };
  Kind kind = Kind::none;
  double budget = 0.0;    // fixed time budget
  double quantile = 0.0;  // fraction of trials to censor
};

/// Ground-truth generator: survival times are drawn by inverse transform
/// from `family` at phi = exp(intercept + coefficients . x). Coefficient
/// keys name either a numeric record field ("attack_strength", "layers",
/// "t_train", ...) or a dummy level ("attack=pgd"); coefficient order
/// defines the column order of the emitted design matrix.
struct GeneratorSpec {
  AftFamily family = AftFamily::exponential;
  ShapeParams shape;
  double intercept = 0.0;
  std::vector<std::pair<std::string, double>> coefficients;
  std::map<std::string, CovariateSampler> covariates;  // by record field name
  CensoringRule censoring;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  void require_valid() const {
    if (n < 1) throw ContractError("GeneratorSpec: n >= 1 required");
    shape.require_valid(family);
    if (censoring.kind == CensoringRule::Kind::budget && !(censoring.budget > 0.0))
      throw ContractError("GeneratorSpec: censoring budget must be positive");
    if (censoring.kind == CensoringRule::Kind::quantile &&
        !(censoring.quantile > 0.0 && censoring.quantile < 1.0))
      throw ContractError("GeneratorSpec: censoring quantile must lie in (0,1)");
  }
};

/// Solves S(t) = u for t. Closed forms where the survival function inverts
/// elementarily; bisection with bracket growth for log_normal and
/// generalized_gamma (tolerance 1e-12 in u).
inline double inverse_transform(AftFamily family, double phi,
                                const ShapeParams& shape, double u) {
  if (!(u > 0.0 && u < 1.0))
    throw DomainError("inverse_transform: require u in (0, 1)");
  if (!(phi > 0.0) || !std::isfinite(phi))
    throw DomainError("inverse_transform: require phi > 0");
  shape.require_valid(family);
  const double log_phi = std::log(phi);
  switch (family) {
    case AftFamily::exponential:
      return -std::log(u) / phi;
    case AftFamily::weibull:
      return std::pow(-std::log(u), shape.sigma) / phi;
    case AftFamily::log_logistic:
      return phi * std::pow((1.0 - u) / u, shape.sigma);
    case AftFamily::log_normal:
    case AftFamily::generalized_gamma: {
      double lo = phi, hi = phi;
      int guard = 0;
      while (survival(family, shape, log_phi, lo) < u && ++guard < 2000) lo *= 0.5;
      guard = 0;
      while (survival(family, shape, log_phi, hi) > u && ++guard < 2000) hi *= 2.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double s = survival(family, shape, log_phi, mid);
        if (std::fabs(s - u) <= 1e-12) return mid;
        (s > u ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  throw ContractError("inverse_transform: unhandled family");
}

namespace detail {

struct SampledRecord {
  ExperimentRecord record;
  std::map<std::string, double> numeric;  // sampled numeric fields
};

inline const std::vector<std::string>& numeric_fields() {
  static const std::vector<std::string> f = {
      "attack_strength", "defence_strength", "layers",  "epochs",
      "t_train",         "t_predict",        "acc_ben", "acc_adv"};
  return f;
}

inline CovariateSampler default_sampler(const std::string& field) {
  if (field == "attack_strength") return CovariateSampler::uniform_range(0.01, 1.0);
  if (field == "defence_strength") return CovariateSampler::constant(0.0);
  if (field == "layers") return CovariateSampler::constant(18.0);
  if (field == "epochs") return CovariateSampler::constant(20.0);
  if (field == "t_train") return CovariateSampler::constant(0.004);
  if (field == "t_predict") return CovariateSampler::constant(0.0002);
  if (field == "acc_ben") return CovariateSampler::constant(0.95);
  if (field == "acc_adv") return CovariateSampler::constant(0.25);
  if (field == "dataset") return CovariateSampler::constant_label("synthetic");
  if (field == "attack") return CovariateSampler::constant_label("sim");
  return CovariateSampler::constant_label("control");  // defence
}

inline double sample_numeric(const CovariateSampler& s, Rng& rng) {
  switch (s.kind) {
    case CovariateSampler::Kind::uniform: return rng.uniform(s.lo, s.hi);
    case CovariateSampler::Kind::constant: return s.value;
    default:
      throw ContractError("generate: categorical sampler bound to a numeric field");
  }
}

inline std::string sample_label(const CovariateSampler& s, Rng& rng) {
  if (s.kind == CovariateSampler::Kind::constant) return s.label;
  if (s.kind != CovariateSampler::Kind::categorical)
    throw ContractError("generate: numeric sampler bound to a categorical field");
  if (s.levels.empty()) throw ContractError("generate: categorical sampler has no levels");
  double total = 0.0;
  for (const auto& [label, w] : s.levels) {
    if (!(w >= 0.0)) throw ContractError("generate: negative level weight");
    total += w;
  }
  if (!(total > 0.0)) throw ContractError("generate: level weights sum to zero");
  double draw = rng.uniform() * total;
  for (const auto& [label, w] : s.levels) {
    draw -= w;
    if (draw < 0.0) return label;
  }
  return s.levels.back().first;
}

inline SampledRecord sample_covariates(const GeneratorSpec& spec, Rng& rng) {
  SampledRecord out;
  auto sampler_for = [&](const std::string& field) {
    const auto it = spec.covariates.find(field);
    return it != spec.covariates.end() ? it->second : default_sampler(field);
  };
  // Fixed sampling order keeps the stream identical regardless of which
  // fields carry coefficients.
  out.record.dataset = sample_label(sampler_for("dataset"), rng);
  out.record.attack = sample_label(sampler_for("attack"), rng);
  out.record.defence = sample_label(sampler_for("defence"), rng);
  for (const std::string& field : numeric_fields())
    out.numeric[field] = sample_numeric(sampler_for(field), rng);

  out.record.attack_strength = out.numeric["attack_strength"];
  out.record.defence_strength = out.numeric["defence_strength"];
  out.record.layers = static_cast<long>(std::llround(out.numeric["layers"]));
  out.record.epochs = static_cast<long>(std::llround(out.numeric["epochs"]));
  out.record.t_train = out.numeric["t_train"];
  out.record.t_predict = out.numeric["t_predict"];
  out.record.acc_ben = std::clamp(out.numeric["acc_ben"], 0.0, 1.0);
  out.record.acc_adv = std::clamp(out.numeric["acc_adv"], 0.0, 1.0);
  return out;
}

/// Value of one linear-predictor term for a sampled record: the raw numeric
/// field, or a 0/1 dummy indicator "field=level".
inline double covariate_value(const SampledRecord& s, const std::string& key) {
  const auto eq = key.find('=');
  if (eq == std::string::npos) {
    const auto it = s.numeric.find(key);
    if (it == s.numeric.end())
      throw ContractError("generate: unknown coefficient key '" + key + "'");
    return it->second;
  }
  const std::string field = key.substr(0, eq);
  const std::string level = key.substr(eq + 1);
  if (field == "dataset") return s.record.dataset == level ? 1.0 : 0.0;
  if (field == "attack") return s.record.attack == level ? 1.0 : 0.0;
  if (field == "defence") return s.record.defence == level ? 1.0 : 0.0;
  throw ContractError("generate: unknown dummy key '" + key + "'");
}

}  // namespace detail

/// Generated log plus the raw design matrix aligned with the generator's
/// coefficient order (ground truth for fitting oracles).
struct SyntheticData {
  std::vector<ExperimentRecord> records;
  SurvivalDataset dataset;
};

inline SyntheticData generate_dataset(const GeneratorSpec& spec) {
  spec.require_valid();
  Rng rng(spec.seed);

  SyntheticData out;
  out.records.reserve(spec.n);
  out.dataset.split_tag = SplitTag::full;
  for (const auto& [key, coef] : spec.coefficients)
    out.dataset.feature_names.push_back(key);
  const std::size_t p = spec.coefficients.size();
  out.dataset.design = math::Matrix(spec.n, p);

  std::vector<double> raw_times(spec.n, 0.0);
  for (std::size_t i = 0; i < spec.n; ++i) {
    detail::SampledRecord s = detail::sample_covariates(spec, rng);
    double lp = spec.intercept;
    for (std::size_t j = 0; j < p; ++j) {
      const double v = detail::covariate_value(s, spec.coefficients[j].first);
      out.dataset.design(i, j) = v;
      lp += spec.coefficients[j].second * v;
    }
    const double u = rng.uniform_open();
    raw_times[i] = inverse_transform(spec.family, std::exp(lp), spec.shape, u);
    out.records.push_back(std::move(s.record));
  }

  // Censoring: fixed budget, or a budget placed at the empirical
  // (1 - q)-quantile so a fraction q of trials is censored.
  double budget = math::inf;
  if (spec.censoring.kind == CensoringRule::Kind::budget) {
    budget = spec.censoring.budget;
  } else if (spec.censoring.kind == CensoringRule::Kind::quantile) {
    std::vector<double> sorted = raw_times;
    std::sort(sorted.begin(), sorted.end());
    budget = math::quantile_sorted(sorted, 1.0 - spec.censoring.quantile);
  }

  for (std::size_t i = 0; i < spec.n; ++i) {
    ExperimentRecord& r = out.records[i];
    if (raw_times[i] > budget) {
      r.t_attack = budget;
      r.event = false;
    } else {
      r.t_attack = raw_times[i];
      r.event = true;
    }
    validate_record(r, "generated record " + std::to_string(i));
    out.dataset.times.push_back(r.t_attack);
    out.dataset.events.push_back(r.event ? 1 : 0);
    out.dataset.source_rows.push_back(i);
    out.dataset.raw_attack_strength.push_back(r.attack_strength);
    out.dataset.raw_defence_strength.push_back(r.defence_strength);
    out.dataset.raw_t_train.push_back(r.t_train);
  }
  return out;
}

inline std::vector<ExperimentRecord> generate(const GeneratorSpec& spec) {
  return generate_dataset(spec).records;
}

// --- JSON form consumed by the simulate CLI ---------------------------------

inline GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
  GeneratorSpec spec;
  spec.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("shape")) {
    const auto& s = j.at("shape");
    if (s.contains("sigma")) spec.shape.sigma = s.at("sigma").get<double>();
    if (s.contains("rho")) spec.shape.rho = s.at("rho").get<double>();
    if (s.contains("beta")) spec.shape.beta = s.at("beta").get<double>();
    if (s.contains("lambda")) spec.shape.lambda = s.at("lambda").get<double>();
  }
  spec.intercept = j.value("intercept", 0.0);
  if (j.contains("coefficients"))
    for (auto it = j.at("coefficients").begin(); it != j.at("coefficients").end(); ++it)
      spec.coefficients.emplace_back(it.key(), it.value().get<double>());
  if (j.contains("covariates")) {
    for (auto it = j.at("covariates").begin(); it != j.at("covariates").end(); ++it) {
      const nlohmann::json& c = it.value();
      CovariateSampler s;
      if (c.contains("uniform")) {
        s = CovariateSampler::uniform_range(c.at("uniform").at(0).get<double>(),
                                            c.at("uniform").at(1).get<double>());
      } else if (c.contains("categorical")) {
        std::vector<std::pair<std::string, double>> levels;
        for (auto lv = c.at("categorical").begin(); lv != c.at("categorical").end(); ++lv)
          levels.emplace_back(lv.key(), lv.value().get<double>());
        s = CovariateSampler::categorical(std::move(levels));
      } else if (c.contains("constant")) {
        if (c.at("constant").is_string())
          s = CovariateSampler::constant_label(c.at("constant").get<std::string>());
        else
          s = CovariateSampler::constant(c.at("constant").get<double>());
      } else {
        throw ContractError("generator spec: covariate '" + it.key() +
                            "' needs uniform, categorical, or constant");
      }
      spec.covariates.emplace(it.key(), std::move(s));
    }
  }
  if (j.contains("censoring")) {
    const auto& c = j.at("censoring");
    if (c.is_string() && c.get<std::string>() == "none") {
      spec.censoring.kind = CensoringRule::Kind::none;
    } else if (c.contains("budget")) {
      spec.censoring.kind = CensoringRule::Kind::budget;
      spec.censoring.budget = c.at("budget").get<double>();
    } else if (c.contains("quantile")) {
      spec.censoring.kind = CensoringRule::Kind::quantile;
      spec.censoring.quantile = c.at("quantile").get<double>();
    } else {
      throw ContractError("generator spec: censoring needs budget, quantile, or \"none\"");
    }
  }
  spec.n = j.at("n").get<std::size_t>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.require_valid();
  return spec;
}

}  // namespace trashfire
