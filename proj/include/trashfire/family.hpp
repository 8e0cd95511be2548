#pragma once

#include <cmath>
#include <string>

#include "trashfire/error.hpp"
#include "trashfire/math/special.hpp"

namespace trashfire {

enum class AftFamily {
  exponential,
  weibull,
  log_normal,
  log_logistic,
  generalized_gamma,
};

inline const char* to_string(AftFamily f) {
  switch (f) {
    case AftFamily::exponential: return "exponential";
    case AftFamily::weibull: return "weibull";
    case AftFamily::log_normal: return "log_normal";
    case AftFamily::log_logistic: return "log_logistic";
    case AftFamily::generalized_gamma: return "generalized_gamma";
  }
  return "unknown";
}

inline AftFamily family_from_string(const std::string& s) {
  if (s == "exponential") return AftFamily::exponential;
  if (s == "weibull") return AftFamily::weibull;
  if (s == "log_normal") return AftFamily::log_normal;
  if (s == "log_logistic") return AftFamily::log_logistic;
  if (s == "generalized_gamma") return AftFamily::generalized_gamma;
  throw ContractError("unknown AFT family '" + s + "'");
}

/// Family-specific shape parameters. `sigma` is used by weibull, log_normal
/// and log_logistic; `rho`, `beta` and the scale `lambda` by
/// generalized_gamma; the exponential has none. Unused fields stay at 1.
struct ShapeParams {
  double sigma = 1.0;
  double rho = 1.0;
  double beta = 1.0;
  double lambda = 1.0;

  bool valid_for(AftFamily f) const {
    switch (f) {
      case AftFamily::exponential: return true;
      case AftFamily::weibull:
      case AftFamily::log_normal:
      case AftFamily::log_logistic:
        return sigma > 0.0 && std::isfinite(sigma);
      case AftFamily::generalized_gamma:
        return rho > 0.0 && beta > 0.0 && lambda > 0.0 &&
               std::isfinite(rho) && std::isfinite(beta) && std::isfinite(lambda);
    }
    return false;
  }

  void require_valid(AftFamily f) const {
    if (!valid_for(f))
      throw ContractError(std::string("invalid shape parameters for family ") +
                          trashfire::to_string(f));
  }
};

/// Number of shape parameters estimated when fitting the family.
/// (generalized_gamma fits rho and beta; lambda is held at 1 because it is
/// redundant with the intercept.)
inline int shape_dim(AftFamily f) {
  switch (f) {
    case AftFamily::exponential: return 0;
    case AftFamily::weibull:
    case AftFamily::log_normal:
    case AftFamily::log_logistic: return 1;
    case AftFamily::generalized_gamma: return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Closed-form survival machinery, parameterized by the log acceleration
// log_phi = theta0 + theta.x. The exponential and Weibull place phi on the
// failure-rate side (S shrinks as phi grows):
//
//   exponential   S(t) = exp(-phi t)
//   weibull       S(t) = exp(-(phi t)^(1/sigma))
//
// while the remaining families stretch time by phi (S grows with phi):
//
//   log_normal    S(t) = 1 - Phi((log t - log phi)/sigma)
//   log_logistic  S(t) = (1 + exp((log t - log phi)/sigma))^-1
//   gen. gamma    S(t) = Q(rho, (lambda t / phi)^beta)
//
// All evaluations run in log space so extreme phi or t cannot overflow.
// ---------------------------------------------------------------------------

inline double log_survival(AftFamily f, const ShapeParams& shape, double log_phi,
                           double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw DomainError("log_survival: require t > 0");
  const double log_t = std::log(t);
  switch (f) {
    case AftFamily::exponential:
      return -std::exp(log_phi + log_t);
    case AftFamily::weibull:
      return -std::exp((log_phi + log_t) / shape.sigma);
    case AftFamily::log_normal:
      return math::norm_log_sf((log_t - log_phi) / shape.sigma);
    case AftFamily::log_logistic:
      return -math::softplus((log_t - log_phi) / shape.sigma);
    case AftFamily::generalized_gamma: {
      const double log_z = std::log(shape.lambda) + log_t - log_phi;
      const double u = std::exp(shape.beta * log_z);
      return math::log_gamma_q(shape.rho, u);
    }
  }
  throw ContractError("log_survival: unhandled family");
}

inline double log_density(AftFamily f, const ShapeParams& shape, double log_phi,
                          double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw DomainError("log_density: require t > 0");
  const double log_t = std::log(t);
  switch (f) {
    case AftFamily::exponential: {
      return log_phi - std::exp(log_phi + log_t);
    }
    case AftFamily::weibull: {
      const double w = (log_phi + log_t) / shape.sigma;
      return -std::log(shape.sigma) - log_t + w - std::exp(w);
    }
    case AftFamily::log_normal: {
      const double z = (log_t - log_phi) / shape.sigma;
      return math::norm_log_pdf(z) - std::log(shape.sigma) - log_t;
    }
    case AftFamily::log_logistic: {
      const double z = (log_t - log_phi) / shape.sigma;
      return -std::log(shape.sigma) - log_t + z - 2.0 * math::softplus(z);
    }
    case AftFamily::generalized_gamma: {
      const double log_z = std::log(shape.lambda) + log_t - log_phi;
      const double u = std::exp(shape.beta * log_z);
      return std::log(shape.beta) - log_t + shape.beta * shape.rho * log_z - u -
             std::lgamma(shape.rho);
    }
  }
  throw ContractError("log_density: unhandled family");
}

inline double survival(AftFamily f, const ShapeParams& shape, double log_phi,
                       double t) {
  return std::exp(log_survival(f, shape, log_phi, t));
}

inline double cumulative_hazard(AftFamily f, const ShapeParams& shape,
                                double log_phi, double t) {
  return -log_survival(f, shape, log_phi, t);
}

inline double density(AftFamily f, const ShapeParams& shape, double log_phi,
                      double t) {
  return std::exp(log_density(f, shape, log_phi, t));
}

inline double hazard(AftFamily f, const ShapeParams& shape, double log_phi,
                     double t) {
  return std::exp(log_density(f, shape, log_phi, t) -
                  log_survival(f, shape, log_phi, t));
}

/// Acceleration-factor identity: the factor psi such that
/// S(t | x) == S_baseline(t / psi) with the baseline at log_phi = 0. The
/// failure-rate families compress time (psi = 1/phi); the rest stretch it.
inline double time_stretch_factor(AftFamily f, double log_phi) {
  switch (f) {
    case AftFamily::exponential:
    case AftFamily::weibull:
      return std::exp(-log_phi);
    default:
      return std::exp(log_phi);
  }
}

/// Median survival time in closed form (generalized_gamma solved by
/// bisection on the regularized incomplete gamma).
inline double median_survival(AftFamily f, const ShapeParams& shape,
                              double log_phi) {
  constexpr double log_log2 = -0.36651292058166432701243915823267;  // log(log 2)
  switch (f) {
    case AftFamily::exponential:
      return std::exp(log_log2 - log_phi);
    case AftFamily::weibull:
      return std::exp(shape.sigma * log_log2 - log_phi);
    case AftFamily::log_normal:
    case AftFamily::log_logistic:
      return std::exp(log_phi);
    case AftFamily::generalized_gamma: {
      // u_med solves P(rho, u) = 1/2, then t = phi u^(1/beta) / lambda.
      double lo = 0.0, hi = std::max(1.0, shape.rho);
      while (math::gamma_p(shape.rho, hi) < 0.5) hi *= 2.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (math::gamma_p(shape.rho, mid) < 0.5 ? lo : hi) = mid;
      }
      const double u_med = 0.5 * (lo + hi);
      return std::exp(log_phi + std::log(u_med) / shape.beta -
                      std::log(shape.lambda));
    }
  }
  throw ContractError("median_survival: unhandled family");
}

}  // namespace trashfire
