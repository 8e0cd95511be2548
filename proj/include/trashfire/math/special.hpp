#pragma once

#include <cmath>
#include <limits>

#include "trashfire/error.hpp"

// Special functions needed by the survival families: standard-normal
// pdf/cdf/sf in log and linear form, the regularized incomplete gamma
// functions, and a few numerically careful helpers. Everything is double
// precision; the normal CDF goes through erfc (relative error < 1e-12 on
// [-8, 8]) with an asymptotic branch where erfc underflows.

namespace trashfire::math {

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double log_two_pi = 1.83787706640934548356065947281123527;
inline constexpr double sqrt_two = 1.41421356237309504880168872420969808;
inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// log(1 + e^z) without overflow.
inline double softplus(double z) {
  if (z > 36.0) return z;
  if (z < -36.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double norm_pdf(double z) {
  return std::exp(-0.5 * z * z - 0.5 * log_two_pi);
}

inline double norm_log_pdf(double z) { return -0.5 * z * z - 0.5 * log_two_pi; }

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / sqrt_two); }

/// Upper tail P(Z >= z).
inline double norm_sf(double z) { return 0.5 * std::erfc(z / sqrt_two); }

/// log of the upper tail, stable for large positive z where erfc underflows.
inline double norm_log_sf(double z) {
  if (z < 30.0) return std::log(norm_sf(z));
  // Asymptotic expansion of Mills' ratio for the far tail.
  const double z2 = z * z;
  const double correction = std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
  return -0.5 * z2 - std::log(z) - 0.5 * log_two_pi + correction;
}

inline double norm_log_cdf(double z) { return norm_log_sf(-z); }

/// Inverse Mills ratio pdf(z)/sf(z), the hazard of the standard normal.
inline double norm_hazard(double z) {
  return std::exp(norm_log_pdf(z) - norm_log_sf(z));
}

namespace detail {

// Series expansion of P(a, x), valid for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
// Returns the fraction h such that Q = exp(-x + a log x - lgamma(a)) * h.
inline double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
    throw DomainError("gamma_p: require a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  const double log_pre = -x + a * std::log(x) - std::lgamma(a);
  return 1.0 - std::exp(log_pre) * detail::gamma_q_cf(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
    throw DomainError("gamma_q: require a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  const double log_pre = -x + a * std::log(x) - std::lgamma(a);
  return std::exp(log_pre) * detail::gamma_q_cf(a, x);
}

/// log Q(a, x), stable when Q underflows (x >> a).
inline double log_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
    throw DomainError("log_gamma_q: require a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    const double p = detail::gamma_p_series(a, x);
    return std::log1p(-p);
  }
  const double log_pre = -x + a * std::log(x) - std::lgamma(a);
  return log_pre + std::log(detail::gamma_q_cf(a, x));
}

}  // namespace trashfire::math
