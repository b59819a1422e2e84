#include "regbp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "regbp/csv.hpp"

namespace regbp {

void StandardLP::validate() const {
  const std::size_t n = objective.size();
  if (a_eq.rows() != b_eq.size()) throw DomainError("LP: equality matrix rows != rhs length");
  if (a_eq.cols() != n && !(a_eq.rows() == 0 && a_eq.cols() == 0)) {
    throw DomainError("LP: equality matrix cols != number of variables");
  }
  if (lower.size() != n || upper.size() != n) throw DomainError("LP: bound vectors have wrong length");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || !std::isfinite(objective[j])) {
      throw DomainError("LP: NaN or infinite data in variable " + std::to_string(j));
    }
    if (lower[j] > upper[j]) throw DomainError("LP: lower bound exceeds upper bound for variable " + std::to_string(j));
    if (lower[j] == kInf || upper[j] == -kInf) throw DomainError("LP: bound on wrong side of infinity");
  }
  for (double v : b_eq)
    if (!std::isfinite(v)) throw DomainError("LP: rhs is not finite");
}

const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
  }
  return "?";
}

double SimplexSolver::column_dot(std::size_t j, std::span<const double> v) const {
  const double* col = columns_.data() + j * rows_;
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) s += col[i] * v[i];
  return s;
}

void SimplexSolver::load(const StandardLP& lp) {
  rows_ = lp.num_rows();
  structural_ = lp.num_vars();
  total_ = structural_ + rows_;
  columns_.assign(total_ * rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < structural_; ++j) columns_[j * rows_ + i] = lp.a_eq(i, j);
  b_ = lp.b_eq;
  lower_ = lp.lower;
  upper_ = lp.upper;
  lower_.resize(total_, 0.0);
  upper_.resize(total_, kInf);
  x_.assign(total_, 0.0);
  state_.assign(total_, State::AtLower);

  for (std::size_t j = 0; j < structural_; ++j) {
    const bool prefer_upper = lp.objective[j] < 0.0 && std::isfinite(upper_[j]);
    if (std::isfinite(lower_[j]) && !prefer_upper) {
      x_[j] = lower_[j];
      state_[j] = State::AtLower;
    } else if (std::isfinite(upper_[j])) {
      x_[j] = upper_[j];
      state_[j] = State::AtUpper;
    } else {
      x_[j] = 0.0;
      state_[j] = State::FreeZero;
    }
  }

  Vector residual = b_;
  for (std::size_t j = 0; j < structural_; ++j) {
    if (x_[j] == 0.0) continue;
    const double* col = columns_.data() + j * rows_;
    for (std::size_t i = 0; i < rows_; ++i) residual[i] -= col[i] * x_[j];
  }
  head_.resize(rows_);
  binv_.assign(rows_ * rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double sign = residual[i] >= 0.0 ? 1.0 : -1.0;
    const std::size_t art = structural_ + i;
    columns_[art * rows_ + i] = sign;
    x_[art] = std::abs(residual[i]);
    state_[art] = State::Basic;
    head_[i] = art;
    binv_[i * rows_ + i] = sign;
  }
  pivots_ = 0;
  since_refactor_ = 0;
}

void SimplexSolver::refactor() {
  const std::size_t r = rows_;
  // Gauss-Jordan with partial pivoting on [B | I].
  std::vector<double> bmat(r * r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < r; ++k) bmat[i * r + k] = columns_[head_[k] * r + i];
  std::vector<double> inv(r * r, 0.0);
  for (std::size_t i = 0; i < r; ++i) inv[i * r + i] = 1.0;
  for (std::size_t c = 0; c < r; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < r; ++i)
      if (std::abs(bmat[i * r + c]) > std::abs(bmat[p * r + c])) p = i;
    const double piv = bmat[p * r + c];
    if (std::abs(piv) < 1e-14) throw DomainError("simplex: basis matrix became singular");
    if (p != c) {
      for (std::size_t k = 0; k < r; ++k) {
        std::swap(bmat[p * r + k], bmat[c * r + k]);
        std::swap(inv[p * r + k], inv[c * r + k]);
      }
    }
    const double ip = 1.0 / piv;
    for (std::size_t k = 0; k < r; ++k) {
      bmat[c * r + k] *= ip;
      inv[c * r + k] *= ip;
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (i == c) continue;
      const double f = bmat[i * r + c];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < r; ++k) {
        bmat[i * r + k] -= f * bmat[c * r + k];
        inv[i * r + k] -= f * inv[c * r + k];
      }
    }
  }
  binv_ = std::move(inv);
  since_refactor_ = 0;
}

void SimplexSolver::recompute_basic_values() {
  Vector rhs = b_;
  for (std::size_t j = 0; j < total_; ++j) {
    if (state_[j] == State::Basic || x_[j] == 0.0) continue;
    const double* col = columns_.data() + j * rows_;
    for (std::size_t i = 0; i < rows_; ++i) rhs[i] -= col[i] * x_[j];
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows_; ++k) s += binv_[i * rows_ + k] * rhs[k];
    x_[head_[i]] = s;
  }
}

void SimplexSolver::row_duals(const Vector& cost, Vector& y) const {
  y.assign(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double cb = cost[head_[i]];
    if (cb == 0.0) continue;
    const double* row = binv_.data() + i * rows_;
    for (std::size_t k = 0; k < rows_; ++k) y[k] += cb * row[k];
  }
}

double SimplexSolver::reduced_cost(std::size_t j, const Vector& y, const Vector& cost) const {
  return cost[j] - column_dot(j, y);
}

void SimplexSolver::pivot(std::size_t leave_row, std::size_t enter, const Vector& alpha) {
  const std::size_t r = rows_;
  double* prow = binv_.data() + leave_row * r;
  const double inv = 1.0 / alpha[leave_row];
  for (std::size_t k = 0; k < r; ++k) prow[k] *= inv;
  for (std::size_t i = 0; i < r; ++i) {
    if (i == leave_row || alpha[i] == 0.0) continue;
    double* row = binv_.data() + i * r;
    const double f = alpha[i];
    for (std::size_t k = 0; k < r; ++k) row[k] -= f * prow[k];
  }
  head_[leave_row] = enter;
  state_[enter] = State::Basic;
  ++pivots_;
  ++since_refactor_;
}

bool SimplexSolver::iterate(const Vector& cost) {
  Vector y;
  Vector alpha(rows_);
  // Bland mode starts after a run of pivots without objective progress and
  // lasts until the objective strictly decreases; cycling needs a constant
  // objective, so it cannot span a switch back to Dantzig.
  std::size_t degenerate_run = 0;
  bool in_bland = opts_.pricing == PricingRule::Bland;
  constexpr std::size_t kDegenerateSwitch = 20;

  for (;;) {
    if (pivots_ >= opts_.max_pivots) throw DomainError("simplex: cycling suspected (pivot cap reached)");
    if (since_refactor_ >= opts_.refactor_every) {
      refactor();
      recompute_basic_values();
    }
    row_duals(cost, y);

    if (degenerate_run >= kDegenerateSwitch) in_bland = true;
    const bool bland = in_bland;
    std::size_t enter = total_;
    double dir = 0.0;
    double enter_d = 0.0;
    double best_score = 0.0;
    for (std::size_t j = 0; j < total_; ++j) {
      const State s = state_[j];
      if (s == State::Basic || lower_[j] == upper_[j]) continue;
      const double d = reduced_cost(j, y, cost);
      double jdir = 0.0;
      if (d < -opts_.optimality_tol && (s == State::AtLower || s == State::FreeZero)) jdir = 1.0;
      else if (d > opts_.optimality_tol && (s == State::AtUpper || s == State::FreeZero)) jdir = -1.0;
      if (jdir == 0.0) continue;
      if (bland) {
        enter = j;
        dir = jdir;
        enter_d = d;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        enter = j;
        dir = jdir;
        enter_d = d;
      }
    }
    if (enter == total_) return true;

    const double* acol = columns_.data() + enter * rows_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = binv_.data() + i * rows_;
      double s = 0.0;
      for (std::size_t k = 0; k < rows_; ++k) s += row[k] * acol[k];
      alpha[i] = s;
    }

    // Ratio test; ties go to the smallest variable index.
    double best = kInf;
    std::size_t leave = rows_;
    bool leave_to_lower = false;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (std::abs(alpha[i]) <= opts_.pivot_tol) continue;
      const std::size_t b = head_[i];
      const double rate = -dir * alpha[i];
      double lim;
      bool to_lower;
      if (rate < 0.0) {
        if (!std::isfinite(lower_[b])) continue;
        lim = (x_[b] - lower_[b]) / -rate;
        to_lower = true;
      } else {
        if (!std::isfinite(upper_[b])) continue;
        lim = (upper_[b] - x_[b]) / rate;
        to_lower = false;
      }
      lim = std::max(lim, 0.0);
      bool take = leave == rows_;
      if (!take) {
        const double tie = 1e-12 * std::max(1.0, best);
        take = lim < best - tie || (lim <= best + tie && b < head_[leave]);
      }
      if (take) {
        best = leave == rows_ ? lim : std::min(best, lim);
        leave = i;
        leave_to_lower = to_lower;
      }
    }
    const double range = upper_[enter] - lower_[enter];
    const bool flip = std::isfinite(range) && range <= best;
    if (!flip && leave == rows_) return false;

    const double step = flip ? range : best;
    if (step > 0.0) {
      x_[enter] += dir * step;
      for (std::size_t i = 0; i < rows_; ++i) x_[head_[i]] += -dir * alpha[i] * step;
    }
    if (step * std::abs(enter_d) > 1e-12) {
      degenerate_run = 0;
      if (opts_.pricing != PricingRule::Bland) in_bland = false;
    } else {
      ++degenerate_run;
    }

    if (flip) {
      if (dir > 0) {
        x_[enter] = upper_[enter];
        state_[enter] = State::AtUpper;
      } else {
        x_[enter] = lower_[enter];
        state_[enter] = State::AtLower;
      }
      ++pivots_;
      ++since_refactor_;
      continue;
    }
    const std::size_t out = head_[leave];
    x_[out] = leave_to_lower ? lower_[out] : upper_[out];
    state_[out] = leave_to_lower ? State::AtLower : State::AtUpper;
    pivot(leave, enter, alpha);
  }
}

void SimplexSolver::drive_out_artificials() {
  Vector alpha(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (head_[r] < structural_) continue;
    const double* brow = binv_.data() + r * rows_;
    std::size_t enter = total_;
    double best = opts_.pivot_tol;
    for (std::size_t j = 0; j < structural_; ++j) {
      if (state_[j] == State::Basic || lower_[j] == upper_[j]) continue;
      const double v = std::abs(column_dot(j, {brow, rows_}));
      if (v > best) {
        best = v;
        enter = j;
      }
    }
    if (enter == total_) continue;  // redundant row: artificial stays basic at zero
    const double* acol = columns_.data() + enter * rows_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = binv_.data() + i * rows_;
      double s = 0.0;
      for (std::size_t k = 0; k < rows_; ++k) s += row[k] * acol[k];
      alpha[i] = s;
    }
    const std::size_t out = head_[r];
    x_[out] = 0.0;
    state_[out] = State::AtLower;
    pivot(r, enter, alpha);
  }
  refactor();
  recompute_basic_values();
}

bool SimplexSolver::dual_iterate(const Vector& cost) {
  Vector y;
  Vector rho(rows_);
  Vector alpha(rows_);
  // Primal infeasibilities below this are treated as settled.
  const double tol = 0.1 * opts_.feasibility_tol;
  std::size_t degenerate_run = 0;
  bool in_bland = opts_.pricing == PricingRule::Bland;
  constexpr std::size_t kDegenerateSwitch = 20;

  for (;;) {
    if (pivots_ >= opts_.max_pivots) throw DomainError("simplex: cycling suspected (pivot cap reached)");
    if (since_refactor_ >= opts_.refactor_every) {
      refactor();
      recompute_basic_values();
    }
    if (degenerate_run >= kDegenerateSwitch) in_bland = true;

    // Leaving row: largest bound violation, or smallest variable index in Bland mode.
    std::size_t r = rows_;
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const std::size_t b = head_[i];
      const double v = x_[b];
      const double viol = v < lower_[b] - tol ? lower_[b] - v : (v > upper_[b] + tol ? v - upper_[b] : 0.0);
      if (viol == 0.0) continue;
      if (in_bland ? (r == rows_ || b < head_[r]) : viol > worst) {
        worst = viol;
        r = i;
      }
    }
    if (r == rows_) return true;

    const std::size_t out = head_[r];
    const bool to_lower = x_[out] < lower_[out];
    row_duals(cost, y);
    std::copy_n(binv_.data() + r * rows_, rows_, rho.begin());

    // Dual ratio test. With t >= 0 the reduced costs move as d_j + t*a_j
    // (leaving to lower) or d_j - t*a_j (leaving to upper); sign them so
    // that eligible columns have s*a_j < 0.
    const double sgn = to_lower ? 1.0 : -1.0;
    std::size_t enter = total_;
    double best = kInf;
    double best_a = 0.0;
    for (std::size_t j = 0; j < total_; ++j) {
      const State st = state_[j];
      if (st == State::Basic || lower_[j] == upper_[j]) continue;
      const double a = sgn * column_dot(j, rho);
      if (std::abs(a) <= opts_.pivot_tol) continue;
      const double d = reduced_cost(j, y, cost);
      double ratio;
      if (a < 0.0 && (st == State::AtLower || st == State::FreeZero)) ratio = std::max(d, 0.0) / -a;
      else if (a > 0.0 && (st == State::AtUpper || st == State::FreeZero)) ratio = std::max(-d, 0.0) / a;
      else continue;
      bool take = enter == total_;
      if (!take) {
        const double tie = 1e-12 * std::max(1.0, best);
        if (ratio < best - tie) take = true;
        else if (ratio <= best + tie) take = in_bland ? false : std::abs(a) > best_a;
      }
      if (take) {
        best = std::min(best, ratio);
        best_a = std::abs(a);
        enter = j;
      }
    }
    if (enter == total_) return false;

    const double* acol = columns_.data() + enter * rows_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = binv_.data() + i * rows_;
      double s = 0.0;
      for (std::size_t k = 0; k < rows_; ++k) s += row[k] * acol[k];
      alpha[i] = s;
    }
    const double target = to_lower ? lower_[out] : upper_[out];
    const double step = (x_[out] - target) / alpha[r];
    x_[enter] += step;
    for (std::size_t i = 0; i < rows_; ++i) x_[head_[i]] -= step * alpha[i];
    x_[out] = target;
    state_[out] = to_lower ? State::AtLower : State::AtUpper;

    if (best * worst > 1e-12) {
      degenerate_run = 0;
      if (opts_.pricing != PricingRule::Bland) in_bland = false;
    } else {
      ++degenerate_run;
    }
    pivot(r, enter, alpha);
  }
}

bool dual_feasible_start(const StandardLP& lp) {
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const double c = lp.objective[j];
    const bool lo = std::isfinite(lp.lower[j]);
    const bool hi = std::isfinite(lp.upper[j]);
    if (lo && hi) continue;
    if (lo && c < 0.0) return false;
    if (hi && c > 0.0) return false;
    if (!lo && !hi && c != 0.0) return false;
  }
  return true;
}

LPOutcome SimplexSolver::solve(const StandardLP& lp) {
  lp.validate();
  if (opts_.algorithm != SimplexAlgorithm::Primal && dual_feasible_start(lp)) return solve_dual(lp);
  return solve_primal(lp);
}

LPOutcome SimplexSolver::solve_dual(const StandardLP& lp) {
  load(lp);
  for (std::size_t j = structural_; j < total_; ++j) upper_[j] = 0.0;
  Vector cost(total_, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), cost.begin());
  if (!dual_iterate(cost)) {
    LPOutcome out;
    out.status = LPStatus::Infeasible;
    out.iterations = pivots_;
    return out;
  }
  return finish(lp, cost);
}

LPOutcome SimplexSolver::solve_primal(const StandardLP& lp) {
  load(lp);
  LPOutcome out;

  Vector phase1(total_, 0.0);
  for (std::size_t j = structural_; j < total_; ++j) phase1[j] = 1.0;
  if (!iterate(phase1)) throw DomainError("simplex: phase 1 reported unbounded (internal error)");
  if (rows_ > 0) {
    refactor();
    recompute_basic_values();
  }
  double infeas = 0.0;
  for (std::size_t j = structural_; j < total_; ++j) infeas += std::abs(x_[j]);
  if (infeas > opts_.feasibility_tol * (1.0 + norm_inf(b_))) {
    out.status = LPStatus::Infeasible;
    out.iterations = pivots_;
    return out;
  }

  drive_out_artificials();
  for (std::size_t j = structural_; j < total_; ++j) {
    upper_[j] = 0.0;
    if (state_[j] != State::Basic) x_[j] = 0.0;
  }

  Vector phase2(total_, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), phase2.begin());
  if (!iterate(phase2)) {
    out.status = LPStatus::Unbounded;
    out.iterations = pivots_;
    return out;
  }
  return finish(lp, phase2);
}

LPOutcome SimplexSolver::finish(const StandardLP& lp, const Vector& cost) {
  if (rows_ > 0) {
    refactor();
    recompute_basic_values();
  }
  LPOutcome out;
  out.iterations = pivots_;
  out.status = LPStatus::Optimal;
  out.solution.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(structural_));
  // Nonbasic values sit exactly on bounds; clamp basic round-off onto the box.
  for (std::size_t j = 0; j < structural_; ++j)
    out.solution[j] = std::clamp(out.solution[j], lower_[j], upper_[j]);
  out.objective = dot(lp.objective, out.solution);
  row_duals(cost, out.duals);
  out.reduced_costs.resize(structural_);
  for (std::size_t j = 0; j < structural_; ++j) out.reduced_costs[j] = reduced_cost(j, out.duals, cost);
  return out;
}

LPOutcome solve_lp(const StandardLP& lp, const SimplexOptions& opts) {
  SimplexSolver solver(opts);
  return solver.solve(lp);
}

namespace {
std::string bound_text(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return format_real(v);
}
}  // namespace

void dump_lp(std::ostream& out, const StandardLP& lp) {
  out << "lp " << lp.num_vars() << ' ' << lp.num_rows() << '\n';
  out << "obj";
  for (double c : lp.objective) out << ' ' << format_real(c);
  out << '\n';
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    out << "row " << i;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) out << ' ' << format_real(lp.a_eq(i, j));
    out << " = " << format_real(lp.b_eq[i]) << '\n';
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j)
    out << "bound " << j << ' ' << bound_text(lp.lower[j]) << ' ' << bound_text(lp.upper[j]) << '\n';
}

}  // namespace regbp
