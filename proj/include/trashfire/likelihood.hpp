#pragma once

#include <cmath>
#include <vector>

#include "trashfire/dataset.hpp"
#include "trashfire/error.hpp"
#include "trashfire/family.hpp"
#include "trashfire/math/linalg.hpp"

namespace trashfire {

/// Natural-scale parameter point for likelihood evaluation: theta[0] is the
/// intercept, theta[1 + j] multiplies design column j.
struct AftParams {
  std::vector<double> theta;
  ShapeParams shape;
};

/// Packed estimation layout: theta..., then sigma (weibull/log_normal/
/// log_logistic) or rho, beta (generalized_gamma; lambda stays fixed).
inline std::size_t packed_dim(AftFamily f, std::size_t covariates) {
  return covariates + 1 + static_cast<std::size_t>(shape_dim(f));
}

inline math::Vector pack_params(AftFamily f, const AftParams& p) {
  math::Vector v = p.theta;
  switch (shape_dim(f)) {
    case 0: break;
    case 1: v.push_back(p.shape.sigma); break;
    default:
      v.push_back(p.shape.rho);
      v.push_back(p.shape.beta);
      break;
  }
  return v;
}

inline AftParams unpack_params(AftFamily f, const math::Vector& v,
                               double lambda = 1.0) {
  const int sd = shape_dim(f);
  if (v.size() < static_cast<std::size_t>(sd) + 1)
    throw ContractError("unpack_params: parameter vector too short");
  AftParams p;
  p.theta.assign(v.begin(), v.end() - sd);
  p.shape.lambda = lambda;
  if (sd == 1) p.shape.sigma = v[v.size() - 1];
  if (sd == 2) {
    p.shape.rho = v[v.size() - 2];
    p.shape.beta = v[v.size() - 1];
  }
  return p;
}

/// Right-censored log-likelihood: sum of log f over events plus log S over
/// censored rows. Infeasible parameter points (non-positive shapes, or any
/// non-finite row contribution) return -infinity as a saturating signal so
/// optimizers can reject the step without exception overhead.
inline double censored_log_likelihood(AftFamily f, const AftParams& p,
                                      const SurvivalDataset& data) {
  if (data.n() == 0) throw ContractError("censored_log_likelihood: empty dataset");
  if (p.theta.size() != data.p() + 1)
    throw ContractError("censored_log_likelihood: theta has length " +
                        std::to_string(p.theta.size()) + ", expected " +
                        std::to_string(data.p() + 1));
  if (!p.shape.valid_for(f)) return -math::inf;

  double loglik = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    double lp = p.theta[0];
    const double* row = data.design.row(i);
    for (std::size_t j = 0; j < data.p(); ++j) lp += p.theta[j + 1] * row[j];
    const double term = data.events[i] ? log_density(f, p.shape, lp, data.times[i])
                                       : log_survival(f, p.shape, lp, data.times[i]);
    if (!std::isfinite(term)) return -math::inf;
    loglik += term;
  }
  return loglik;
}

inline bool has_analytic_gradient(AftFamily f) {
  return f != AftFamily::generalized_gamma;
}

namespace detail {

// Central-difference gradient over the packed layout; used for the
// generalized gamma, whose survival depends on the incomplete gamma's
// parameter derivative (no elementary form).
inline math::Vector fd_gradient(AftFamily f, const AftParams& p,
                                const SurvivalDataset& data, double h_scale) {
  math::Vector v = pack_params(f, p);
  math::Vector g(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double h = h_scale * std::max(1.0, std::fabs(v[i]));
    const double saved = v[i];
    v[i] = saved + h;
    const double up = censored_log_likelihood(f, unpack_params(f, v, p.shape.lambda), data);
    v[i] = saved - h;
    const double dn = censored_log_likelihood(f, unpack_params(f, v, p.shape.lambda), data);
    v[i] = saved;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

}  // namespace detail

/// Gradient of the censored log-likelihood over the packed layout.
/// Analytic for exponential/weibull/log_normal/log_logistic; central
/// differences for generalized_gamma (step `fd_h` relative).
inline math::Vector censored_log_likelihood_gradient(AftFamily f,
                                                     const AftParams& p,
                                                     const SurvivalDataset& data,
                                                     double fd_h = 1e-6) {
  if (!p.shape.valid_for(f))
    throw ContractError("censored_log_likelihood_gradient: infeasible shape");
  if (p.theta.size() != data.p() + 1)
    throw ContractError("censored_log_likelihood_gradient: dimension mismatch");
  if (f == AftFamily::generalized_gamma) return detail::fd_gradient(f, p, data, fd_h);

  const std::size_t dim = packed_dim(f, data.p());
  math::Vector g(dim, 0.0);
  const double sigma = p.shape.sigma;
  for (std::size_t i = 0; i < data.n(); ++i) {
    double lp = p.theta[0];
    const double* row = data.design.row(i);
    for (std::size_t j = 0; j < data.p(); ++j) lp += p.theta[j + 1] * row[j];
    const double log_t = std::log(data.times[i]);
    const bool event = data.events[i] != 0;

    double d_lp = 0.0;     // d loglik / d linear predictor
    double d_shape = 0.0;  // d loglik / d sigma
    switch (f) {
      case AftFamily::exponential: {
        const double ew = std::exp(lp + log_t);
        d_lp = event ? 1.0 - ew : -ew;
        break;
      }
      case AftFamily::weibull: {
        const double w = (lp + log_t) / sigma;
        const double ew = std::exp(w);
        if (event) {
          d_lp = (1.0 - ew) / sigma;
          d_shape = (-1.0 - w * (1.0 - ew)) / sigma;
        } else {
          d_lp = -ew / sigma;
          d_shape = w * ew / sigma;
        }
        break;
      }
      case AftFamily::log_normal: {
        const double z = (log_t - lp) / sigma;
        if (event) {
          d_lp = z / sigma;
          d_shape = (z * z - 1.0) / sigma;
        } else {
          const double mills = math::norm_hazard(z);
          d_lp = mills / sigma;
          d_shape = z * mills / sigma;
        }
        break;
      }
      case AftFamily::log_logistic: {
        const double z = (log_t - lp) / sigma;
        const double sig = math::sigmoid(z);
        if (event) {
          d_lp = (2.0 * sig - 1.0) / sigma;
          d_shape = (-1.0 - z * (1.0 - 2.0 * sig)) / sigma;
        } else {
          d_lp = sig / sigma;
          d_shape = z * sig / sigma;
        }
        break;
      }
      default:
        throw ContractError("censored_log_likelihood_gradient: unhandled family");
    }

    g[0] += d_lp;
    for (std::size_t j = 0; j < data.p(); ++j) g[j + 1] += d_lp * row[j];
    if (shape_dim(f) == 1) g[dim - 1] += d_shape;
  }
  return g;
}

}  // namespace trashfire
