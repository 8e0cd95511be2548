#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "trashfire/error.hpp"
#include "trashfire/math/linalg.hpp"

namespace trashfire {

struct OptimOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-7;
  double step_tolerance = 1e-9;
};

struct OptimResult {
  math::Vector x;
  double value = 0.0;
  math::Vector gradient;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> objective_trace;  // accepted objective values
};

/// Dense BFGS with Armijo backtracking on a callable
/// `double fg(const Vector& x, Vector& grad)`. The callable may return
/// +infinity for infeasible points; the line search backs away from them.
template <typename FG>
OptimResult bfgs_minimize(FG&& fg, math::Vector x0, const OptimOptions& opt) {
  const std::size_t n = x0.size();
  OptimResult res;
  res.x = std::move(x0);
  res.gradient.assign(n, 0.0);
  res.value = fg(res.x, res.gradient);
  if (!std::isfinite(res.value))
    throw ContractError("bfgs_minimize: objective not finite at the start point");
  res.objective_trace.push_back(res.value);

  // Inverse Hessian approximation, started at a gradient-scaled identity.
  math::Matrix h(n, n, 0.0);
  const double h0 = 1.0 / std::max(1.0, math::norm_inf(res.gradient));
  for (std::size_t i = 0; i < n; ++i) h(i, i) = h0;
  bool first_update = true;

  math::Vector d(n), x_new(n), g_new(n), s(n), y(n), hy(n);
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (math::norm_inf(res.gradient) <= opt.gradient_tolerance) {
      res.converged = true;
      res.stop_reason = "gradient tolerance reached";
      return res;
    }

    double descent = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v -= h(i, j) * res.gradient[j];
      d[i] = v;
      descent += v * res.gradient[i];
    }
    if (!(descent < 0.0)) {  // stale curvature; fall back to steepest descent
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) h(i, j) = i == j ? 1.0 : 0.0;
        d[i] = -res.gradient[i];
      }
      descent = -math::dot(res.gradient, res.gradient);
    }

    // Backtracking line search (Armijo, c1 = 1e-4).
    double step = 1.0;
    double f_new = math::inf;
    bool accepted = false;
    for (int ls = 0; ls < 64; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * d[i];
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.value + 1e-4 * step * descent) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = true;
      res.stop_reason = "step size underflow in line search";
      return res;
    }

    double step_norm = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - res.x[i];
      y[i] = g_new[i] - res.gradient[i];
      sy += s[i] * y[i];
      step_norm = std::max(step_norm, std::fabs(s[i]));
    }
    res.x = x_new;
    res.value = f_new;
    res.gradient = g_new;
    res.objective_trace.push_back(res.value);

    if (step_norm <= opt.step_tolerance) {
      res.converged = true;
      res.stop_reason = "step tolerance reached";
      ++res.iterations;
      return res;
    }

    // BFGS inverse-Hessian update, skipped when curvature is unusable.
    if (sy > 1e-12 * math::norm2(s) * math::norm2(y)) {
      if (first_update) {
        // Classic curvature rescaling of the initial approximation.
        const double yy = math::dot(y, y);
        if (yy > 0.0) {
          const double gamma = sy / yy;
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) h(i, j) = i == j ? gamma : 0.0;
        }
        first_update = false;
      }
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += h(i, j) * y[j];
        hy[i] = v;
      }
      const double yhy = math::dot(y, hy);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h(i, j) += (1.0 + rho * yhy) * rho * s[i] * s[j] -
                     rho * (s[i] * hy[j] + hy[i] * s[j]);
        }
      }
    }
  }
  res.stop_reason = "maximum iterations exceeded";
  return res;
}

}  // namespace trashfire
