#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "trashfire/error.hpp"

namespace trashfire::math {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

namespace detail {

// 15-point Kronrod abscissae (positive half) and weights; the embedded
// 7-point Gauss rule sits on the odd-indexed nodes.
inline constexpr double kronrod_x[8] = {
    0.99145537112081263920685469752633, 0.94910791234275852452618968404785,
    0.86486442335976907278971278864093, 0.74153118559939443986386477328079,
    0.58608723546769113029414483825873, 0.40584515137739716690660641207696,
    0.20778495500789846760068940377324, 0.0};
inline constexpr double kronrod_w[8] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318921,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171};
inline constexpr double gauss_w[4] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633};

template <typename F>
inline void gauss_kronrod_15(F&& f, double a, double b, double& kronrod,
                             double& gauss) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  kronrod = kronrod_w[7] * fc;
  gauss = gauss_w[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_x[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kronrod_w[i] * (f1 + f2);
    if (i % 2 == 1) gauss += gauss_w[i / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 15(7) on [a, b] to an absolute tolerance.
/// Segments whose |K15 - G7| gap exceeds their share of the tolerance are
/// bisected. Throws DomainError if the integrand returns a non-finite value
/// (the message carries the offending abscissa).
template <typename F>
QuadResult integrate(F&& f, double a, double b, double abs_tol,
                     int max_depth = 60) {
  if (!(b > a)) throw DomainError("integrate: require b > a");
  if (!(abs_tol > 0.0)) throw DomainError("integrate: require abs_tol > 0");

  auto checked = [&f](double x) {
    const double v = f(x);
    if (!std::isfinite(v))
      throw DomainError("integrate: non-finite integrand value at u=" +
                        std::to_string(x));
    return v;
  };

  struct Segment {
    double a, b;
    int depth;
  };
  std::vector<Segment> stack{{a, b, 0}};
  QuadResult out;
  const double total_len = b - a;
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    double k = 0.0, g = 0.0;
    detail::gauss_kronrod_15(checked, seg.a, seg.b, k, g);
    out.evaluations += 15;
    const double err = std::fabs(k - g);
    const double share = abs_tol * (seg.b - seg.a) / total_len;
    if (err <= share || seg.depth >= max_depth) {
      out.value += k;
      out.error_estimate += err;
    } else {
      const double mid = 0.5 * (seg.a + seg.b);
      stack.push_back({seg.a, mid, seg.depth + 1});
      stack.push_back({mid, seg.b, seg.depth + 1});
    }
  }
  return out;
}

}  // namespace trashfire::math
