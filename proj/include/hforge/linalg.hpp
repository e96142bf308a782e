#pragma once

#include <cmath>
#include <vector>

#include "hforge/errors.hpp"
#include "hforge/jet.hpp"

namespace hforge {

template <class S>
using Matrix = std::vector<std::vector<S>>;

inline double magnitude(const cplx& z) { return std::abs(z); }
inline double magnitude(const Jet& j) { return std::abs(j.value()); }

template <class S>
Matrix<S> filled(size_t n, size_t m, const S& value) {
  return Matrix<S>(n, std::vector<S>(m, value));
}

// Gauss-Jordan inverse with partial pivoting on the leading (constant)
// magnitude; a pivot below rel_tol * max|a_ij| raises `kind`.
template <class S>
Matrix<S> inverse(Matrix<S> a, const S& zero, const S& one, ErrorKind kind,
                  double rel_tol = 1e-13) {
  const size_t n = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (const auto& x : row) scale = std::max(scale, magnitude(x));
  Matrix<S> inv = filled(n, n, zero);
  for (size_t i = 0; i < n; ++i) inv[i][i] = one;
  if (scale == 0.0) throw Error(kind, std::string(to_string(kind)) + ": zero matrix");
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (magnitude(a[r][col]) > magnitude(a[piv][col])) piv = r;
    if (magnitude(a[piv][col]) <= rel_tol * scale)
      throw Error(kind, std::string(to_string(kind)) + ": singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    S p = one / a[col][col];
    for (size_t c = 0; c < n; ++c) {
      a[col][c] = a[col][c] * p;
      inv[col][c] = inv[col][c] * p;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      S f = a[r][col];
      for (size_t c = 0; c < n; ++c) {
        a[r][c] = a[r][c] - f * a[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

template <>
inline Matrix<cplx> inverse(Matrix<cplx> a, const cplx& zero, const cplx& one, ErrorKind kind,
                            double rel_tol) {
  const size_t n = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (const auto& x : row) scale = std::max(scale, std::abs(x));
  Matrix<cplx> inv = filled(n, n, zero);
  for (size_t i = 0; i < n; ++i) inv[i][i] = one;
  if (scale == 0.0) throw Error(kind, std::string(to_string(kind)) + ": zero matrix");
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= rel_tol * scale)
      throw Error(kind, std::string(to_string(kind)) + ": singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    cplx p = one / a[col][col];
    for (size_t c = 0; c < n; ++c) {
      a[col][c] *= p;
      inv[col][c] *= p;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == zero) continue;
      cplx f = a[r][col];
      for (size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

template <class S>
std::vector<S> mat_vec(const Matrix<S>& a, const std::vector<S>& x, const S& zero) {
  std::vector<S> y(a.size(), zero);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] = y[i] + a[i][j] * x[j];
  return y;
}

cplx determinant(Matrix<cplx> a);

}  // namespace hforge
