#include <catch2/catch.hpp>

#include <cmath>

#include "trashfire/math/linalg.hpp"
#include "trashfire/math/quadrature.hpp"
#include "trashfire/math/special.hpp"
#include "trashfire/math/spline.hpp"
#include "trashfire/rng.hpp"

using namespace trashfire;

TEST_CASE("normal cdf/sf against reference values", "[special]") {
  CHECK(math::norm_cdf(0.0) == Approx(0.5).epsilon(1e-14));
  CHECK(math::norm_cdf(1.0) == Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(math::norm_cdf(2.0) == Approx(0.9772498680518208).epsilon(1e-12));
  CHECK(math::norm_cdf(-1.96) == Approx(0.024997895148220435).epsilon(1e-12));
  CHECK(math::norm_sf(1.0) == Approx(1.0 - 0.8413447460685429).epsilon(1e-12));

  for (double z : {-6.0, -2.0, -0.3, 0.0, 0.7, 3.5, 7.0})
    CHECK(math::norm_cdf(z) + math::norm_sf(z) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("log survival of the normal stays stable in the far tail", "[special]") {
  // Continuity across the asymptotic branch point.
  const double a = math::norm_log_sf(29.99);
  const double b = math::norm_log_sf(30.01);
  CHECK(a > b);
  CHECK(std::fabs(a - b) < 0.7);
  // Against exact values where erfc is still accurate.
  CHECK(math::norm_log_sf(5.0) == Approx(std::log(math::norm_sf(5.0))).epsilon(1e-12));
  // Far tail stays finite and ordered.
  CHECK(std::isfinite(math::norm_log_sf(60.0)));
  CHECK(math::norm_log_sf(60.0) < math::norm_log_sf(50.0));
  // Hazard of the normal approaches z for large z.
  CHECK(math::norm_hazard(40.0) == Approx(40.0).epsilon(1e-3));
}

TEST_CASE("regularized incomplete gamma", "[special]") {
  // P(1, x) = 1 - exp(-x)
  for (double x : {0.1, 0.5, 1.0, 3.0, 10.0})
    CHECK(math::gamma_p(1.0, x) == Approx(-std::expm1(-x)).epsilon(1e-13));
  // P(1/2, x) = erf(sqrt(x))
  for (double x : {0.04, 0.25, 1.21, 4.0})
    CHECK(math::gamma_p(0.5, x) == Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
  // Complementarity and log form.
  for (double a : {0.3, 1.7, 6.0})
    for (double x : {0.2, 2.0, 9.0, 40.0}) {
      CHECK(math::gamma_p(a, x) + math::gamma_q(a, x) == Approx(1.0).epsilon(1e-12));
      CHECK(math::log_gamma_q(a, x) ==
            Approx(std::log(math::gamma_q(a, x))).margin(1e-10));
    }
  // log Q stays finite where Q underflows.
  CHECK(std::isfinite(math::log_gamma_q(1.0, 800.0)));
  CHECK(math::log_gamma_q(1.0, 800.0) == Approx(-800.0).epsilon(1e-12));
  CHECK_THROWS_AS(math::gamma_p(-1.0, 1.0), DomainError);
}

TEST_CASE("adaptive Gauss-Kronrod integration", "[quadrature]") {
  auto sq = [](double x) { return x * x; };
  CHECK(math::integrate(sq, 0.0, 1.0, 1e-10).value == Approx(1.0 / 3.0).epsilon(1e-12));

  auto sine = [](double x) { return std::sin(x); };
  CHECK(math::integrate(sine, 0.0, math::pi, 1e-10).value == Approx(2.0).epsilon(1e-10));

  // Integrable endpoint singularity (nodes never touch the endpoints).
  auto inv_sqrt = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK(math::integrate(inv_sqrt, 0.0, 1.0, 1e-9).value == Approx(2.0).epsilon(1e-7));

  auto bad = [](double x) { return x < 0.5 ? 1.0 : math::nan; };
  CHECK_THROWS_AS(math::integrate(bad, 0.0, 1.0, 1e-8), DomainError);
  CHECK_THROWS_AS(math::integrate(sq, 1.0, 0.0, 1e-8), DomainError);
}

TEST_CASE("cholesky solve and SPD inverse", "[linalg]") {
  math::Matrix a(3, 3);
  // SPD by construction: A = M^T M + I.
  const double m[3][3] = {{1, 2, 0}, {0, 1, 1}, {1, 0, 1}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += m[k][i] * m[k][j];
      a(i, j) = s;
    }
  const math::Vector b = {1.0, -2.0, 0.5};
  const auto x = math::solve_spd(a, b);
  REQUIRE(x.has_value());
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += a(i, j) * (*x)[j];
    CHECK(s == Approx(b[i]).epsilon(1e-12));
  }

  const auto inv = math::invert_spd(a);
  REQUIRE(inv.has_value());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * (*inv)(k, j);
      CHECK(s == Approx(i == j ? 1.0 : 0.0).margin(1e-12));
    }

  math::Matrix singular(2, 2, 1.0);  // rank 1
  CHECK_FALSE(math::cholesky(singular).has_value());
}

TEST_CASE("sample quantiles use linear interpolation", "[spline]") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  CHECK(math::quantile_sorted(x, 0.5) == Approx(3.0));
  CHECK(math::quantile_sorted(x, 0.0) == Approx(1.0));
  CHECK(math::quantile_sorted(x, 1.0) == Approx(5.0));
  CHECK(math::quantile_sorted(x, 0.25) == Approx(2.0));
  CHECK(math::quantile_sorted(x, 0.1) == Approx(1.4));
}

TEST_CASE("restricted cubic spline reproduces smooth targets", "[spline]") {
  // Exact recovery of a line (the basis contains it).
  std::vector<double> xs, ys;
  for (int i = 0; i <= 200; ++i) {
    const double x = -2.0 + 4.0 * i / 200.0;
    xs.push_back(x);
    ys.push_back(0.7 * x - 0.3);
  }
  const std::vector<double> knots = {-1.5, -0.5, 0.0, 0.5, 1.5};
  const auto coef = math::rcs_fit(xs, ys, knots, 1e-8);
  for (double x : {-1.9, -0.7, 0.1, 0.9, 1.9})
    CHECK(math::rcs_eval(x, knots, coef) == Approx(0.7 * x - 0.3).margin(1e-8));

  // Close tracking of a gentle nonlinearity.
  std::vector<double> yc;
  for (double x : xs) yc.push_back(std::tanh(x));
  const auto coef2 = math::rcs_fit(xs, yc, knots, 1e-8);
  for (double x : {-1.5, -0.4, 0.0, 0.8, 1.5})
    CHECK(math::rcs_eval(x, knots, coef2) == Approx(std::tanh(x)).margin(0.02));

  CHECK_THROWS_AS(math::rcs_basis(0.0, {0.0, 1.0}), ContractError);
}

TEST_CASE("deterministic rng", "[rng]") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.below(13);
    CHECK(v < 13);
  }

  std::vector<int> base = {0, 1, 2, 3, 4, 5, 6, 7};
  auto shuffled = base;
  Rng s(3);
  s.shuffle(shuffled);
  auto sorted = shuffled;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == base);

  // Same seed, same permutation.
  auto again = base;
  Rng s2(3);
  s2.shuffle(again);
  CHECK(again == shuffled);
}
