#include "regbp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace regbp {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DomainError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                      std::to_string(rows * cols));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw DomainError("matrix entry is not finite");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::column(std::span<const double> v) {
  return DenseMatrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Vector DenseMatrix::col(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matrix product: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix difference: shape mismatch");
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix sum: shape mismatch");
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

Vector operator*(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DomainError("matrix-vector product: dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

Vector mul_transpose(const DenseMatrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw DomainError("transposed product: dimension mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * xi;
  }
  return out;
}

DenseMatrix mul_transpose(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DomainError("transposed product: row counts differ");
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aki * b(k, j);
    }
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& a) {
  DenseMatrix g(a.cols(), a.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (std::size_t j = i; j < a.cols(); ++j) g(i, j) += aki * a(k, j);
    }
  }
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x / scale) * (x / scale);
  return scale * std::sqrt(s);
}

double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm_inf(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double max_abs(const DenseMatrix& a) { return norm_inf(a.data()); }

double frobenius(const DenseMatrix& a) { return norm2(a.data()); }

Vector subvector(std::span<const double> v, const IndexSet& s) {
  Vector out;
  out.reserve(s.size());
  for (std::size_t i : s) {
    if (i >= v.size()) throw DomainError("subvector index " + std::to_string(i) + " out of range");
    out.push_back(v[i]);
  }
  return out;
}

DenseMatrix submatrix_cols(const DenseMatrix& a, const IndexSet& s) {
  if (s.bound() > a.cols()) {
    throw DomainError("column index " + std::to_string(s.bound() - 1) + " out of range for " +
                      std::to_string(a.cols()) + " columns");
  }
  DenseMatrix out(a.rows(), s.size());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < s.size(); ++k) out(r, k) = a(r, s[k]);
  return out;
}

DenseMatrix principal_submatrix(const DenseMatrix& g, const IndexSet& s) { return submatrix(g, s, s); }

DenseMatrix submatrix(const DenseMatrix& g, const IndexSet& r, const IndexSet& c) {
  if (r.bound() > g.rows() || c.bound() > g.cols()) throw DomainError("submatrix index out of range");
  DenseMatrix out(r.size(), c.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = g(r[i], c[j]);
  return out;
}

bool is_symmetric(const DenseMatrix& g, double tol) {
  if (g.rows() != g.cols()) return false;
  const double scale = std::max(1.0, max_abs(g));
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(g(i, j) - g(j, i)) > tol * scale) return false;
  return true;
}

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot, double value)
    : DomainError("matrix is not positive definite: pivot " + std::to_string(pivot) + " = " +
                  std::to_string(value)),
      pivot_(pivot) {}

Cholesky::Cholesky(const DenseMatrix& g) : l_(g.rows(), g.cols()) {
  if (g.rows() != g.cols()) throw DomainError("Cholesky: matrix is not square");
  if (!is_symmetric(g)) throw DomainError("Cholesky: matrix is not symmetric");
  const std::size_t n = g.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, g(i, i));
  const double floor = 1e-12 * max_diag;
  for (std::size_t j = 0; j < n; ++j) {
    double d = g(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > floor)) throw NotPositiveDefinite(j, d);
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / ljj;
    }
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw DomainError("Cholesky solve: dimension mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x[k];
    x[i] = s / l_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

DenseMatrix Cholesky::solve(const DenseMatrix& b) const {
  if (b.rows() != size()) throw DomainError("Cholesky solve: dimension mismatch");
  DenseMatrix x(b.rows(), b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    const Vector xc = solve(b.col(c));
    for (std::size_t r = 0; r < b.rows(); ++r) x(r, c) = xc[r];
  }
  return x;
}

DenseMatrix solve_spd(const DenseMatrix& g, const DenseMatrix& b) { return Cholesky(g).solve(b); }

Vector solve_spd(const DenseMatrix& g, std::span<const double> b) { return Cholesky(g).solve(b); }

Vector sym_eigvals(const DenseMatrix& g) {
  if (g.rows() != g.cols()) throw DomainError("sym_eigvals: matrix is not square");
  if (g.rows() > 64) throw DomainError("sym_eigvals: matrix larger than 64x64");
  if (!is_symmetric(g)) throw DomainError("sym_eigvals: matrix is not symmetric");
  const std::size_t n = g.rows();
  DenseMatrix a = g;
  // symmetrize exactly so rotations act on a truly symmetric array
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));

  const double target = 1e-14 * frobenius(a);
  auto off = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation zeroing a(p,q): t = tan(angle), smaller root.
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }

  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double operator_norm(const DenseMatrix& b) {
  if (b.empty()) throw DomainError("operator_norm: empty matrix");
  const DenseMatrix g = b.rows() < b.cols() ? gram(b.transpose()) : gram(b);
  const Vector ev = sym_eigvals(g);
  return std::sqrt(std::max(0.0, ev.back()));
}

DenseMatrix projector(const DenseMatrix& a, const IndexSet& s) {
  const std::size_t n = a.rows();
  DenseMatrix m = DenseMatrix::identity(n);
  if (s.empty()) return m;
  const DenseMatrix as = submatrix_cols(a, s);
  DenseMatrix coef;
  try {
    coef = solve_spd(gram(as), as.transpose());  // (A_S'A_S)^{-1} A_S'
  } catch (const NotPositiveDefinite&) {
    throw DomainError("support Gram singular");
  }
  const DenseMatrix p = as * coef;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) -= p(i, j);
  return m;
}

}  // namespace regbp
