#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "regbp/linalg.hpp"
#include "regbp/rng.hpp"

namespace regbp::testing {

inline DenseMatrix gaussian(std::size_t n, std::size_t m, Rng& rng) {
  DenseMatrix a(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = rng.gaussian();
  return a;
}

inline void normalize_columns(DenseMatrix& a) {
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
    s = std::sqrt(s);
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) /= s;
  }
}

/// n rows of an orthonormal basis of R^m whose first m - n directions are
/// near-constant vectors (1 + eps * noise); columns normalized afterwards.
/// Low coherence: the Gram is close to (I - 11'/m) / (1 - 1/m).
inline DenseMatrix incoherent(std::size_t n, std::size_t m, double eps, Rng& rng) {
  std::vector<Vector> basis;
  for (std::size_t j = 0; j < m; ++j) {
    Vector v(m);
    for (double& e : v) e = rng.gaussian();
    if (j + n < m)
      for (double& e : v) e = 1.0 + eps * e;
    for (const Vector& q : basis) {
      const double d = dot(q, v);
      for (std::size_t i = 0; i < m; ++i) v[i] -= d * q[i];
    }
    const double s = norm2(v);
    for (double& e : v) e /= s;
    basis.push_back(std::move(v));
  }
  DenseMatrix a(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = basis[m - n + i][j];
  normalize_columns(a);
  return a;
}

/// Least-squares residual of y on the columns S (normal equations via
/// Gauss-Jordan with partial pivoting); nullopt when A_S is rank deficient.
inline std::optional<std::pair<Vector, double>> least_squares(const DenseMatrix& a, const std::vector<std::size_t>& s,
                                                              const Vector& y) {
  const std::size_t k = s.size();
  std::vector<std::vector<double>> g(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = 0; q < k; ++q)
      for (std::size_t i = 0; i < a.rows(); ++i) g[p][q] += a(i, s[p]) * a(i, s[q]);
    for (std::size_t i = 0; i < a.rows(); ++i) g[p][k] += a(i, s[p]) * y[i];
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(g[r][c]) > std::abs(g[piv][c])) piv = r;
    if (std::abs(g[piv][c]) < 1e-10) return std::nullopt;
    std::swap(g[c], g[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = g[r][c] / g[c][c];
      for (std::size_t q = c; q <= k; ++q) g[r][q] -= f * g[c][q];
    }
  }
  Vector coef(k);
  for (std::size_t c = 0; c < k; ++c) coef[c] = g[c][k] / g[c][c];
  Vector r = y;
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t i = 0; i < a.rows(); ++i) r[i] -= coef[p] * a(i, s[p]);
  return std::make_pair(coef, norm2(r));
}

/// Sparsest x with A x = y by exhaustive search over supports of increasing
/// size. Returns the support of the first (lexicographically smallest) fit.
inline std::optional<std::vector<std::size_t>> l0_support(const DenseMatrix& a, const Vector& y, std::size_t max_size,
                                                          double tol = 1e-9) {
  const std::size_t m = a.cols();
  if (norm2(y) <= tol) return std::vector<std::size_t>{};
  for (std::size_t k = 1; k <= max_size; ++k) {
    std::vector<std::size_t> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    while (true) {
      const auto fit = least_squares(a, s, y);
      if (fit && fit->second <= tol * std::max(1.0, norm2(y))) return s;
      std::size_t i = k;
      while (i > 0 && s[i - 1] == m - k + i - 1) --i;
      if (i == 0) break;
      ++s[i - 1];
      for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
    }
  }
  return std::nullopt;
}

/// Visits every size-k subset of {0..m-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t m, std::size_t k, F&& f) {
  if (k > m) return;
  std::vector<std::size_t> s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  while (true) {
    f(s);
    std::size_t i = k;
    while (i > 0 && s[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

}  // namespace regbp::testing
