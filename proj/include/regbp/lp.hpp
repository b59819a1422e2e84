#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>

#include "regbp/linalg.hpp"

namespace regbp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// min c'x  s.t.  A_eq x = b_eq,  lower <= x <= upper  (bounds may be infinite).
struct StandardLP {
  Vector objective;
  DenseMatrix a_eq;
  Vector b_eq;
  Vector lower;
  Vector upper;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return b_eq.size(); }
  /// Throws DomainError on shape mismatch, lower > upper, or NaN data.
  void validate() const;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LPStatus s);

struct LPOutcome {
  LPStatus status = LPStatus::Infeasible;
  Vector solution;
  double objective = 0.0;
  std::size_t iterations = 0;
  /// Row multipliers y of the final basis; reduced costs are c - A_eq'y.
  Vector duals;
  Vector reduced_costs;
};

enum class PricingRule {
  /// Smallest eligible index enters, smallest tied index leaves.
  Bland,
  /// Most negative reduced cost, falling back to Bland during degenerate runs.
  DantzigWithBlandFallback,
};

enum class SimplexAlgorithm {
  /// Dual simplex when the artificial start basis is dual feasible, else primal.
  Auto,
  /// Two-phase primal simplex.
  Primal,
  /// Dual simplex from the artificial basis; falls back to primal when that
  /// basis is not dual feasible.
  Dual,
};

struct SimplexOptions {
  SimplexAlgorithm algorithm = SimplexAlgorithm::Auto;
  double pivot_tol = 1e-10;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  std::size_t refactor_every = 50;
  std::size_t max_pivots = 1'000'000;
  PricingRule pricing = PricingRule::DantzigWithBlandFallback;
};

/// Revised simplex over bounded variables with a dense explicit basis inverse,
/// refactorized every `refactor_every` pivots.
///
/// Every run starts from one artificial column per row. The primal path is a
/// classic two-phase method. The dual path fixes the artificials at zero and
/// starts from y = 0, which is dual feasible whenever each variable's cost
/// sign matches its finite bounds (true for all l1 recovery programs); it then
/// pivots primal infeasibilities out, which avoids the long degenerate primal
/// runs that sparse optima cause.
///
/// Holds its own working memory, so one instance per thread.
class SimplexSolver {
 public:
  explicit SimplexSolver(SimplexOptions opts = {}) : opts_(opts) {}
  LPOutcome solve(const StandardLP& lp);

 private:
  enum class State : unsigned char { Basic, AtLower, AtUpper, FreeZero };

  void load(const StandardLP& lp);
  LPOutcome solve_primal(const StandardLP& lp);
  LPOutcome solve_dual(const StandardLP& lp);
  /// Returns false when a primal infeasibility admits no entering column.
  bool dual_iterate(const Vector& cost);
  LPOutcome finish(const StandardLP& lp, const Vector& cost);
  void refactor();
  void recompute_basic_values();
  /// Runs simplex iterations on cost vector c; returns false on unboundedness.
  bool iterate(const Vector& cost);
  void drive_out_artificials();
  double reduced_cost(std::size_t j, const Vector& y, const Vector& cost) const;
  void row_duals(const Vector& cost, Vector& y) const;
  void pivot(std::size_t leave_row, std::size_t enter, const Vector& alpha);
  double column_dot(std::size_t j, std::span<const double> v) const;

  SimplexOptions opts_;
  std::size_t rows_ = 0;
  std::size_t structural_ = 0;
  std::size_t total_ = 0;
  std::vector<double> columns_;  // column-major, rows_ x total_
  Vector b_;
  Vector lower_;
  Vector upper_;
  Vector x_;
  std::vector<State> state_;
  std::vector<std::size_t> head_;  // basic variable per row
  std::vector<double> binv_;       // row-major rows_ x rows_
  std::size_t pivots_ = 0;
  std::size_t since_refactor_ = 0;
};

LPOutcome solve_lp(const StandardLP& lp, const SimplexOptions& opts = {});

/// True when y = 0 with every variable at a cost-appropriate bound is dual
/// feasible, i.e. the dual simplex can start from the artificial basis.
bool dual_feasible_start(const StandardLP& lp);

/// Debug dump of an LP:
///   lp <vars> <rows>
///   obj c_0 ... c_{n-1}
///   row <i> a_i0 ... a_i,n-1 = b_i      (one line per equality)
///   bound <j> <lower> <upper>           (one line per variable; -inf/inf allowed)
void dump_lp(std::ostream& out, const StandardLP& lp);

}  // namespace regbp
