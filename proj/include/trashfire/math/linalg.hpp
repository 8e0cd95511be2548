#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "trashfire/error.hpp"

namespace trashfire::math {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sized for design matrices and small Hessians;
/// nothing here is tuned for large p.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  double* row(std::size_t i) { return data_.data() + i * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& other) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dot_row(const Matrix& m, std::size_t i, const Vector& v) {
  const double* r = m.row(i);
  double s = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) s += r[j] * v[j];
  return s;
}

inline double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// Returns nullopt when the matrix is not (numerically) SPD.
inline std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw ContractError("cholesky: matrix must be square");
  Matrix l(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) return std::nullopt;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

/// Solves L L^T x = b given the Cholesky factor L.
inline Vector cholesky_solve(const Matrix& l, const Vector& b) {
  const std::size_t n = l.rows();
  Vector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  Vector x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

inline std::optional<Vector> solve_spd(const Matrix& a, const Vector& b) {
  const auto l = cholesky(a);
  if (!l) return std::nullopt;
  return cholesky_solve(*l, b);
}

/// Inverse of an SPD matrix via its Cholesky factor; nullopt when singular.
inline std::optional<Matrix> invert_spd(const Matrix& a) {
  const auto l = cholesky(a);
  if (!l) return std::nullopt;
  const std::size_t n = a.rows();
  Matrix inv(n, n, 0.0);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = cholesky_solve(*l, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

}  // namespace trashfire::math
