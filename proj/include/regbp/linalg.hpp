#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "regbp/error.hpp"
#include "regbp/index_set.hpp"

namespace regbp {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Entries are required to be finite when the
/// matrix is built from external data.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws DomainError if data.size() != rows*cols or any entry is not finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);
  /// Single-column matrix holding v.
  static DenseMatrix column(std::span<const double> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  Vector col(std::size_t c) const;
  const std::vector<double>& data() const { return data_; }

  DenseMatrix transpose() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
Vector operator*(const DenseMatrix& a, std::span<const double> x);

/// A'x
Vector mul_transpose(const DenseMatrix& a, std::span<const double> x);
/// A'B
DenseMatrix mul_transpose(const DenseMatrix& a, const DenseMatrix& b);
/// A'A
DenseMatrix gram(const DenseMatrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm1(std::span<const double> v);
double norm_inf(std::span<const double> v);
double max_abs(const DenseMatrix& a);
double frobenius(const DenseMatrix& a);

Vector subvector(std::span<const double> v, const IndexSet& s);

/// Columns of A listed in S, in ascending index order.
DenseMatrix submatrix_cols(const DenseMatrix& a, const IndexSet& s);
/// Principal submatrix G[S, S].
DenseMatrix principal_submatrix(const DenseMatrix& g, const IndexSet& s);
/// Block G[R, C].
DenseMatrix submatrix(const DenseMatrix& g, const IndexSet& r, const IndexSet& c);

/// Raised when a symmetric factorization meets a pivot <= 1e-12 * max diagonal.
class NotPositiveDefinite : public DomainError {
 public:
  NotPositiveDefinite(std::size_t pivot, double value);
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Cholesky factor L (lower) with G = L L'.
class Cholesky {
 public:
  explicit Cholesky(const DenseMatrix& g);

  std::size_t size() const { return l_.rows(); }
  const DenseMatrix& factor() const { return l_; }
  DenseMatrix solve(const DenseMatrix& b) const;
  Vector solve(std::span<const double> b) const;

 private:
  DenseMatrix l_;
};

/// Solves G X = B for symmetric positive definite G.
DenseMatrix solve_spd(const DenseMatrix& g, const DenseMatrix& b);
Vector solve_spd(const DenseMatrix& g, std::span<const double> b);

/// All eigenvalues of a symmetric matrix (at most 64x64), ascending.
/// Cyclic Jacobi rotations until the off-diagonal Frobenius mass falls below
/// 1e-14 * ||G||_F.
Vector sym_eigvals(const DenseMatrix& g);

/// Induced 2-norm: sqrt of the largest eigenvalue of the smaller Gram matrix.
double operator_norm(const DenseMatrix& b);

/// M(S) = I - A_S (A_S'A_S)^{-1} A_S'.
DenseMatrix projector(const DenseMatrix& a, const IndexSet& s);

bool is_symmetric(const DenseMatrix& g, double tol = 1e-12);

}  // namespace regbp
