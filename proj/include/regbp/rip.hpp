#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regbp/linalg.hpp"

namespace regbp {

/// Largest column count accepted by exact subset enumeration.
inline constexpr std::size_t kRipColumnCap = 24;
/// Largest number of (subset, split) evaluations one table build may need.
inline constexpr double kRipWorkBudget = 2e9;

/// Exact restricted isometry (delta_s) and restricted orthogonality
/// (theta_{s1,s2}) constants of one matrix, for all orders up to s_max.
///
/// Values are running maxima over sizes: delta_s covers every support of size
/// at most s, theta_{s1,s2} every disjoint pair of sizes at most (s1, s2).
/// Order zero is defined as 0.
class RipTable {
 public:
  RipTable() = default;

  /// Enumerates all supports of size <= s_max. Throws DomainError when the
  /// matrix has more than kRipColumnCap columns, s_max exceeds the column
  /// count, or the enumeration exceeds kRipWorkBudget.
  static RipTable compute(const DenseMatrix& a, std::size_t s_max, std::size_t workers = 1);

  std::size_t s_max() const { return s_max_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// Throws DomainError when s > s_max.
  double delta(std::size_t s) const;
  /// Symmetric in its arguments; throws DomainError when s1 + s2 > s_max.
  double theta(std::size_t s1, std::size_t s2) const;
  bool covers_delta(std::size_t s) const { return s <= s_max_; }
  bool covers_theta(std::size_t s1, std::size_t s2) const { return s1 + s2 <= s_max_; }

 private:
  std::size_t s_max_ = 0;
  std::size_t cols_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::vector<double> delta_;  // index s
  std::vector<double> theta_;  // (s_max+1)^2, index s1*(s_max+1)+s2
};

/// FNV-1a over shape and entry bits.
std::uint64_t matrix_fingerprint(const DenseMatrix& a);

/// Number of size-s subsets of an m-set, as a double (exact below 2^53).
double binomial(std::size_t m, std::size_t s);

/// delta_s over supports of size exactly s.
double ric(const DenseMatrix& a, std::size_t s);
/// theta over disjoint supports of sizes exactly s1 and s2.
double roc(const DenseMatrix& a, std::size_t s1, std::size_t s2);

/// a_k(s, sc) = (theta_{sc,s} + theta_{sc,k} theta_{s,k} / (1 - delta_k))
///              / (1 - delta_s - theta_{s,k}^2 / (1 - delta_k)).
/// Throws DomainError "condition violated" when either denominator is <= 0.
double a_fn(const RipTable& t, std::size_t k, std::size_t s, std::size_t sc);
/// K_k(u) = sqrt(1 + delta_u) / (1 - delta_u - theta_{u,k}^2 / (1 - delta_k)).
double k_fn(const RipTable& t, std::size_t k, std::size_t u);

struct ConditionCheck {
  std::string name;
  double lhs = 0.0;        // +inf when a constant is undefined
  double threshold = 1.0;  // every condition reads lhs < threshold
  double margin = 0.0;     // threshold - lhs
  bool pass = false;
};

struct ConditionReport {
  std::size_t k = 0;
  std::size_t u = 0;
  std::size_t k_b = 0;
  std::vector<ConditionCheck> checks;
  bool pass = false;
};

/// Largest order theorem1_conditions reads: max(k + 2u, 3u).
std::size_t condition_order(std::size_t k, std::size_t u);

/// Evaluates
///   delta_{k+u} < 1,
///   delta_{2u} + delta_k + theta_{k,2u}^2 < 1,
///   a_k(2u, u) + a_{k_b}(u, u) < 1.
/// Throws DomainError when the table does not cover the orders involved or
/// k_b > k.
ConditionReport theorem1_conditions(const RipTable& t, std::size_t k, std::size_t u, std::size_t k_b);

}  // namespace regbp
