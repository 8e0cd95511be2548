#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "trashfire/dataset.hpp"
#include "trashfire/error.hpp"
#include "trashfire/likelihood.hpp"
#include "trashfire/model.hpp"
#include "trashfire/optimize.hpp"

namespace trashfire {

struct FitConfig {
  int max_iterations = 500;
  double gradient_tolerance = 1e-7;
  double step_tolerance = 1e-9;
  double ridge_penalty = 1e-9;  // on covariate coefficients only

  enum class Init { scale_aware, zeros };
  Init initialization = Init::scale_aware;

  void require_valid() const {
    if (max_iterations < 1) throw ContractError("FitConfig: max_iterations >= 1");
    if (!(gradient_tolerance > 0.0) || !(step_tolerance > 0.0))
      throw ContractError("FitConfig: tolerances must be positive");
    if (ridge_penalty < 0.0)
      throw ContractError("FitConfig: ridge_penalty must be non-negative");
  }
};

/// Coefficients above this magnitude abort a Cox fit with a
/// diverging-coefficient diagnostic. On centered/scaled covariates this is
/// a hazard ratio beyond e^10 ~ 2e4, the usual symptom of complete
/// separation rather than signal.
inline constexpr double cox_divergence_bound = 10.0;

namespace detail {

// Transformed estimation space: shapes are optimized as logs so every
// iterate stays feasible. v = [theta..., log sigma] or [theta..., log rho,
// log beta].
inline math::Vector to_transformed(AftFamily f, const math::Vector& packed) {
  math::Vector v = packed;
  const int sd = shape_dim(f);
  for (int k = 0; k < sd; ++k) {
    double& val = v[v.size() - 1 - static_cast<std::size_t>(k)];
    val = std::log(val);
  }
  return v;
}

inline math::Vector from_transformed(AftFamily f, const math::Vector& v) {
  math::Vector packed = v;
  const int sd = shape_dim(f);
  for (int k = 0; k < sd; ++k) {
    double& val = packed[packed.size() - 1 - static_cast<std::size_t>(k)];
    val = std::exp(val);
  }
  return packed;
}

inline math::Vector scale_aware_init(AftFamily f, const SurvivalDataset& data) {
  double mean_t = 0.0, mean_log_t = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    mean_t += data.times[i];
    mean_log_t += std::log(data.times[i]);
  }
  mean_t /= static_cast<double>(data.n());
  mean_log_t /= static_cast<double>(data.n());

  math::Vector v(packed_dim(f, data.p()), 0.0);
  // The failure-accelerating families carry the rate in phi, so the
  // feasible scale-aware start is the negated log time scale.
  switch (f) {
    case AftFamily::exponential:
    case AftFamily::weibull:
      v[0] = -std::log(mean_t);
      break;
    default:
      v[0] = mean_log_t;
      break;
  }
  const std::size_t base = data.p() + 1;
  if (shape_dim(f) == 1) v[base] = 1.0;  // sigma
  if (shape_dim(f) == 2) {
    v[base] = 1.0;      // rho: gen gamma at its Weibull embedding
    v[base + 1] = 1.0;  // beta
  }
  return v;
}

// Inverts the observed information restricted to its non-degenerate block.
// Parameters with (numerically) no information (zero-variance features)
// get NaN so reporting can flag them individually; a singular active block
// returns an empty vector (all intervals unavailable).
inline std::vector<double> selective_standard_errors(const math::Matrix& info) {
  const std::size_t dim = info.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < dim; ++i) max_diag = std::max(max_diag, info(i, i));
  if (!(max_diag > 0.0)) return {};
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < dim; ++i)
    if (info(i, i) > 1e-10 * max_diag) active.push_back(i);
  if (active.empty()) return {};
  math::Matrix sub(active.size(), active.size());
  for (std::size_t i = 0; i < active.size(); ++i)
    for (std::size_t j = 0; j < active.size(); ++j)
      sub(i, j) = info(active[i], active[j]);
  const auto cov = math::invert_spd(sub);
  if (!cov) return {};
  std::vector<double> se(dim, math::nan);
  for (std::size_t i = 0; i < active.size(); ++i) {
    const double var = (*cov)(i, i);
    se[active[i]] = var > 0.0 ? std::sqrt(var) : math::nan;
  }
  return se;
}

// Observed information (negative Hessian of the unpenalized log-likelihood)
// by central differences of the gradient over the packed natural layout.
inline std::vector<double> standard_errors_from_information(
    AftFamily f, const AftParams& at, const SurvivalDataset& data) {
  const math::Vector packed = pack_params(f, at);
  const std::size_t dim = packed.size();
  math::Matrix info(dim, dim, 0.0);
  math::Vector v = packed;
  for (std::size_t j = 0; j < dim; ++j) {
    const double h = 1e-5 * std::max(1.0, std::fabs(packed[j]));
    v[j] = packed[j] + h;
    const math::Vector gp = censored_log_likelihood_gradient(
        f, unpack_params(f, v, at.shape.lambda), data);
    v[j] = packed[j] - h;
    const math::Vector gm = censored_log_likelihood_gradient(
        f, unpack_params(f, v, at.shape.lambda), data);
    v[j] = packed[j];
    for (std::size_t i = 0; i < dim; ++i)
      info(i, j) = -(gp[i] - gm[i]) / (2.0 * h);
  }
  // Symmetrize before inverting.
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double m = 0.5 * (info(i, j) + info(j, i));
      info(i, j) = info(j, i) = m;
    }
  return selective_standard_errors(info);
}

}  // namespace detail

/// Maximum-likelihood fit of a parametric AFT family on right-censored
/// data. Deterministic for a fixed (dataset, config). Throws
/// IdentifiabilityError when the data carry no events and ConvergenceError
/// (with the best point seen) when the optimizer stalls.
inline AftModel fit_aft(AftFamily family, const SurvivalDataset& train,
                        const FitConfig& config = {}) {
  config.require_valid();
  if (train.n() == 0) throw ContractError("fit_aft: empty dataset");
  if (train.n_events() == 0)
    throw IdentifiabilityError(
        "fit_aft: no events in the training data; all-censored data cannot "
        "identify the time scale");

  const std::size_t p = train.p();
  const double ridge = config.ridge_penalty;

  auto objective = [&](const math::Vector& v, math::Vector& grad) -> double {
    const math::Vector packed = detail::from_transformed(family, v);
    const AftParams params = unpack_params(family, packed);
    const double ll = censored_log_likelihood(family, params, train);
    if (!std::isfinite(ll)) return math::inf;

    double penalty = 0.0;
    if (family == AftFamily::generalized_gamma) {
      // No analytic gradient for this family: central differences on the
      // transformed objective.
      grad.assign(v.size(), 0.0);
      math::Vector vv = v;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::fabs(v[i]));
        vv[i] = v[i] + h;
        const double up = censored_log_likelihood(
            family, unpack_params(family, detail::from_transformed(family, vv)), train);
        vv[i] = v[i] - h;
        const double dn = censored_log_likelihood(
            family, unpack_params(family, detail::from_transformed(family, vv)), train);
        vv[i] = v[i];
        grad[i] = -(up - dn) / (2.0 * h);
      }
    } else {
      const math::Vector g = censored_log_likelihood_gradient(family, params, train);
      grad.assign(v.size(), 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) grad[i] = -g[i];
      // Chain rule for the log-shape coordinates.
      for (int k = 0; k < shape_dim(family); ++k) {
        const std::size_t idx = v.size() - 1 - static_cast<std::size_t>(k);
        grad[idx] *= packed[idx];
      }
    }
    for (std::size_t j = 1; j <= p; ++j) {
      penalty += 0.5 * ridge * v[j] * v[j];
      grad[j] += ridge * v[j];
    }
    return -ll + penalty;
  };

  math::Vector v0 = detail::scale_aware_init(family, train);
  if (config.initialization == FitConfig::Init::zeros) {
    std::fill(v0.begin(), v0.end(), 0.0);
  } else {
    v0 = detail::to_transformed(family, v0);
  }

  OptimOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.gradient_tolerance = config.gradient_tolerance;
  opt.step_tolerance = config.step_tolerance;
  const OptimResult res = bfgs_minimize(objective, v0, opt);
  if (!res.converged)
    throw ConvergenceError("fit_aft(" + std::string(to_string(family)) +
                               "): " + res.stop_reason + " after " +
                               std::to_string(res.iterations) + " iterations",
                           detail::from_transformed(family, res.x), res.value,
                           res.iterations);

  const math::Vector packed = detail::from_transformed(family, res.x);
  const AftParams params = unpack_params(family, packed);

  AftModel model;
  model.family = family;
  model.theta.assign(params.theta.begin(), params.theta.end());
  model.shape = params.shape;
  model.feature_names = train.feature_names;
  model.log_likelihood = censored_log_likelihood(family, params, train);
  model.n_params = static_cast<int>(packed.size());
  model.standard_errors =
      detail::standard_errors_from_information(family, params, train);
  model.require_consistent();
  return model;
}

// ---------------------------------------------------------------------------
// Cox partial likelihood (Breslow ties), Breslow baseline
// ---------------------------------------------------------------------------

namespace detail {

struct CoxWork {
  std::vector<std::size_t> order;  // rows sorted by descending time
  const SurvivalDataset* data = nullptr;
};

// Negative Breslow partial log-likelihood and gradient. Sweeps rows in
// descending time order so the risk-set sums accumulate incrementally; ties
// share the full risk set.
inline double cox_negative_partial_loglik(const CoxWork& work,
                                          const math::Vector& theta,
                                          math::Vector& grad, double ridge) {
  const SurvivalDataset& data = *work.data;
  const std::size_t p = data.p();
  grad.assign(p, 0.0);
  double loglik = 0.0;
  double s0 = 0.0;
  math::Vector s1(p, 0.0);

  std::size_t i = 0;
  const std::size_t n = work.order.size();
  while (i < n) {
    const double t = data.times[work.order[i]];
    // Add every row tied at this time to the risk set first.
    std::size_t j = i;
    while (j < n && data.times[work.order[j]] == t) {
      const std::size_t row = work.order[j];
      const double w = std::exp(math::dot_row(data.design, row, theta));
      s0 += w;
      const double* x = data.design.row(row);
      for (std::size_t k = 0; k < p; ++k) s1[k] += w * x[k];
      ++j;
    }
    for (std::size_t e = i; e < j; ++e) {
      const std::size_t row = work.order[e];
      if (!data.events[row]) continue;
      loglik += math::dot_row(data.design, row, theta) - std::log(s0);
      const double* x = data.design.row(row);
      for (std::size_t k = 0; k < p; ++k) grad[k] += x[k] - s1[k] / s0;
    }
    i = j;
  }

  double penalty = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    penalty += 0.5 * ridge * theta[k] * theta[k];
    grad[k] = -grad[k] + ridge * theta[k];
  }
  return -loglik + penalty;
}

}  // namespace detail

/// Breslow partial log-likelihood at an arbitrary coefficient vector.
inline double cox_log_partial_likelihood(const SurvivalDataset& data,
                                         const math::Vector& theta) {
  if (theta.size() != data.p())
    throw ContractError("cox_log_partial_likelihood: dimension mismatch");
  detail::CoxWork work;
  work.data = &data;
  work.order.resize(data.n());
  std::iota(work.order.begin(), work.order.end(), std::size_t{0});
  std::sort(work.order.begin(), work.order.end(), [&](std::size_t a, std::size_t b) {
    if (data.times[a] != data.times[b]) return data.times[a] > data.times[b];
    return a < b;
  });
  math::Vector grad(data.p(), 0.0);
  return -detail::cox_negative_partial_loglik(work, theta, grad, 0.0);
}

/// Breslow-tie Cox fit with a Breslow baseline cumulative hazard estimated
/// at the optimum. Coefficients whose magnitude crosses
/// cox_divergence_bound abort with a diverging-coefficient diagnostic
/// (the usual symptom of complete separation).
inline CoxModel fit_cox(const SurvivalDataset& train, const FitConfig& config = {}) {
  config.require_valid();
  if (train.n() == 0) throw ContractError("fit_cox: empty dataset");
  if (train.n_events() == 0)
    throw IdentifiabilityError("fit_cox: no events in the training data");

  detail::CoxWork work;
  work.data = &train;
  work.order.resize(train.n());
  std::iota(work.order.begin(), work.order.end(), std::size_t{0});
  std::sort(work.order.begin(), work.order.end(), [&](std::size_t a, std::size_t b) {
    if (train.times[a] != train.times[b]) return train.times[a] > train.times[b];
    return a < b;
  });

  auto objective = [&](const math::Vector& theta, math::Vector& grad) -> double {
    if (math::norm_inf(theta) > cox_divergence_bound) {
      grad.assign(train.p(), 0.0);
      return math::inf;  // feasibility wall; divergence is diagnosed below
    }
    return detail::cox_negative_partial_loglik(work, theta, grad, config.ridge_penalty);
  };

  OptimOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.gradient_tolerance = config.gradient_tolerance;
  opt.step_tolerance = config.step_tolerance;
  const OptimResult res = bfgs_minimize(objective, math::Vector(train.p(), 0.0), opt);
  if (math::norm_inf(res.x) > cox_divergence_bound - 1.0)
    throw ConvergenceError(
        "fit_cox: coefficient magnitude approached the divergence bound " +
            std::to_string(cox_divergence_bound) +
            "; a covariate may perfectly order the events (complete separation)",
        res.x, res.value, res.iterations);
  if (!res.converged)
    throw ConvergenceError("fit_cox: " + res.stop_reason + " after " +
                               std::to_string(res.iterations) + " iterations",
                           res.x, res.value, res.iterations);

  CoxModel model;
  model.theta = res.x;
  model.feature_names = train.feature_names;
  {
    math::Vector g(train.p(), 0.0);
    model.log_partial_likelihood =
        -detail::cox_negative_partial_loglik(work, model.theta, g, 0.0);
  }

  // Breslow baseline: dH0 at each unique event time = d / sum_{risk} exp(lp).
  std::vector<std::size_t> asc(work.order.rbegin(), work.order.rend());
  math::Vector exp_lp(train.n(), 0.0);
  for (std::size_t r = 0; r < train.n(); ++r)
    exp_lp[r] = std::exp(math::dot_row(train.design, r, model.theta));
  // Suffix sums over ascending order give the risk-set denominator.
  math::Vector risk_sum(train.n() + 1, 0.0);
  for (std::size_t k = train.n(); k-- > 0;)
    risk_sum[k] = risk_sum[k + 1] + exp_lp[asc[k]];
  double h0 = 0.0;
  std::size_t k = 0;
  while (k < train.n()) {
    const double t = train.times[asc[k]];
    std::size_t d = 0;
    std::size_t j = k;
    while (j < train.n() && train.times[asc[j]] == t) {
      if (train.events[asc[j]]) ++d;
      ++j;
    }
    if (d > 0) {
      h0 += static_cast<double>(d) / risk_sum[k];
      model.baseline.emplace_back(t, h0);
    }
    k = j;
  }

  // Standard errors from the observed partial-likelihood information.
  {
    const std::size_t dim = train.p();
    math::Matrix info(dim, dim, 0.0);
    math::Vector v = model.theta;
    math::Vector gp(dim), gm(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const double h = 1e-5 * std::max(1.0, std::fabs(model.theta[j]));
      v[j] = model.theta[j] + h;
      detail::cox_negative_partial_loglik(work, v, gp, 0.0);
      v[j] = model.theta[j] - h;
      detail::cox_negative_partial_loglik(work, v, gm, 0.0);
      v[j] = model.theta[j];
      for (std::size_t i2 = 0; i2 < dim; ++i2)
        info(i2, j) = (gp[i2] - gm[i2]) / (2.0 * h);
    }
    for (std::size_t i2 = 0; i2 < dim; ++i2)
      for (std::size_t j2 = i2 + 1; j2 < dim; ++j2) {
        const double m = 0.5 * (info(i2, j2) + info(j2, i2));
        info(i2, j2) = info(j2, i2) = m;
      }
    if (dim > 0) model.standard_errors = detail::selective_standard_errors(info);
  }
  model.require_consistent();
  return model;
}

/// Diagnostic: maximum relative deviation between the analytic gradient and
/// a plain central-difference gradient with absolute step h.
inline double numerical_gradient_check(AftFamily family, const AftParams& params,
                                       const SurvivalDataset& data, double h) {
  if (!(h > 0.0)) throw DomainError("numerical_gradient_check: require h > 0");
  const math::Vector analytic = censored_log_likelihood_gradient(family, params, data);
  math::Vector v = pack_params(family, params);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double saved = v[i];
    v[i] = saved + h;
    const double up =
        censored_log_likelihood(family, unpack_params(family, v, params.shape.lambda), data);
    v[i] = saved - h;
    const double dn =
        censored_log_likelihood(family, unpack_params(family, v, params.shape.lambda), data);
    v[i] = saved;
    const double fd = (up - dn) / (2.0 * h);
    const double rel = std::fabs(fd - analytic[i]) / std::max(1.0, std::fabs(analytic[i]));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace trashfire
