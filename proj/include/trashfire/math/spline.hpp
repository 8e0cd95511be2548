#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "trashfire/error.hpp"
#include "trashfire/math/linalg.hpp"

namespace trashfire::math {

/// Linear-interpolation sample quantile (R type 7). `sorted` must be
/// ascending and nonempty.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ContractError("quantile_sorted: empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Default knot placement quantiles for restricted cubic splines
/// (Harrell's recommended sets for 3..7 knots, uniform tails otherwise).
inline std::vector<double> rcs_knot_quantiles(int knots) {
  switch (knots) {
    case 3: return {0.10, 0.50, 0.90};
    case 4: return {0.05, 0.35, 0.65, 0.95};
    case 5: return {0.05, 0.275, 0.50, 0.725, 0.95};
    case 6: return {0.05, 0.23, 0.41, 0.59, 0.77, 0.95};
    case 7: return {0.025, 0.1833, 0.3417, 0.50, 0.6583, 0.8167, 0.975};
    default: {
      if (knots < 3) throw ContractError("rcs_knot_quantiles: need >= 3 knots");
      std::vector<double> q(static_cast<std::size_t>(knots));
      for (int i = 0; i < knots; ++i)
        q[static_cast<std::size_t>(i)] =
            0.05 + 0.90 * static_cast<double>(i) / static_cast<double>(knots - 1);
      return q;
    }
  }
}

/// Restricted cubic spline basis at x for ascending distinct knots:
/// [1, x, s_1(x), ..., s_{K-2}(x)], linear beyond the boundary knots.
inline Vector rcs_basis(double x, const std::vector<double>& knots) {
  const std::size_t k = knots.size();
  if (k < 3) throw ContractError("rcs_basis: need >= 3 knots");
  Vector b(k, 0.0);
  b[0] = 1.0;
  b[1] = x;
  const double t_last = knots[k - 1];
  const double t_penult = knots[k - 2];
  const double span = t_last - knots[0];
  const double scale = span * span;
  auto cube_pos = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
  for (std::size_t j = 0; j + 2 < k; ++j) {
    const double tj = knots[j];
    double term = cube_pos(x - tj);
    term -= cube_pos(x - t_penult) * (t_last - tj) / (t_last - t_penult);
    term += cube_pos(x - t_last) * (t_penult - tj) / (t_last - t_penult);
    b[j + 2] = term / scale;
  }
  return b;
}

/// Least-squares fit of y on the RCS basis with a small ridge penalty on
/// the nonlinear coefficients (the penalty only regularizes near-collinear
/// bases; it does not smooth). Returns basis coefficients.
inline Vector rcs_fit(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& knots, double penalty) {
  if (x.size() != y.size()) throw ContractError("rcs_fit: size mismatch");
  const std::size_t n = x.size();
  const std::size_t k = knots.size();
  Matrix xtx(k, k, 0.0);
  Vector xty(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector b = rcs_basis(x[i], knots);
    for (std::size_t r = 0; r < k; ++r) {
      xty[r] += b[r] * y[i];
      for (std::size_t c = r; c < k; ++c) xtx(r, c) += b[r] * b[c];
    }
  }
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < r; ++c) xtx(r, c) = xtx(c, r);
  for (std::size_t j = 2; j < k; ++j) xtx(j, j) += penalty;

  auto sol = solve_spd(xtx, xty);
  double jitter = 1e-10;
  while (!sol && jitter < 1.0) {
    Matrix a = xtx;
    for (std::size_t j = 0; j < k; ++j) a(j, j) += jitter;
    sol = solve_spd(a, xty);
    jitter *= 100.0;
  }
  if (!sol) throw ContractError("rcs_fit: normal equations are singular");
  return *sol;
}

inline double rcs_eval(double x, const std::vector<double>& knots,
                       const Vector& coef) {
  const Vector b = rcs_basis(x, knots);
  return dot(b, coef);
}

}  // namespace trashfire::math
