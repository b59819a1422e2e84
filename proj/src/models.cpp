#include "regbp/models.hpp"

#include <algorithm>
#include <cmath>

namespace regbp {

RecoveryInstance RecoveryInstance::from_signal(DenseMatrix a, Vector x) {
  if (x.size() != a.cols()) throw DomainError("signal length does not match matrix columns");
  RecoveryInstance inst;
  inst.y = a * x;
  std::vector<std::size_t> nz;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) nz.push_back(i);
  inst.support = IndexSet::from_unsorted(std::move(nz));
  inst.a = std::move(a);
  inst.x_true = std::move(x);
  return inst;
}

RecoveryInstance RecoveryInstance::from_measurements(DenseMatrix a, Vector y, std::optional<Vector> x_true) {
  if (y.size() != a.rows()) throw DomainError("measurement length does not match matrix rows");
  for (double v : y)
    if (!std::isfinite(v)) throw DomainError("measurement is not finite");
  RecoveryInstance inst;
  if (x_true) {
    inst = from_signal(a, *x_true);
    const double scale = std::max(1.0, norm_inf(inst.y));
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (std::abs(y[i] - inst.y[i]) > 1e-12 * scale * static_cast<double>(a.cols())) {
        throw DomainError("y differs from A*x_true at row " + std::to_string(i));
      }
    }
  } else {
    inst.a = std::move(a);
  }
  inst.y = std::move(y);
  return inst;
}

PriorKnowledge::PriorKnowledge(IndexSet t, Vector mu_hat_t, double rho, std::size_t m)
    : t_(std::move(t)), mu_(std::move(mu_hat_t)), rho_(rho), m_(m) {
  if (t_.bound() > m_) throw DomainError("support estimate index out of range");
  if (mu_.size() != t_.size()) throw DomainError("mu_hat length does not match |T|");
  if (!(rho_ >= 0.0)) throw DomainError("rho must be nonnegative");
  for (double v : mu_)
    if (!std::isfinite(v)) throw DomainError("mu_hat is not finite");
}

PriorKnowledge PriorKnowledge::for_instance(const RecoveryInstance& inst, IndexSet t, Vector mu_hat_t, double rho) {
  PriorKnowledge p(std::move(t), std::move(mu_hat_t), rho, inst.m());
  if (inst.x_true) p.require_feasible(*inst.x_true);
  return p;
}

Vector PriorKnowledge::mu_hat_full() const {
  Vector mu(m_, 0.0);
  for (std::size_t k = 0; k < t_.size(); ++k) mu[t_[k]] = mu_[k];
  return mu;
}

double PriorKnowledge::max_deviation(std::span<const double> x) const {
  double d = 0.0;
  for (std::size_t k = 0; k < t_.size(); ++k) d = std::max(d, std::abs(x[t_[k]] - mu_[k]));
  return d;
}

double PriorKnowledge::rho_tolerance() const {
  return std::isfinite(rho_) ? 1e-9 * std::max(1.0, rho_) : 0.0;
}

void PriorKnowledge::require_feasible(std::span<const double> x) const {
  if (x.size() != m_) throw DomainError("signal length does not match prior");
  const double dev = max_deviation(x);
  if (dev > rho_ + rho_tolerance()) {
    throw DomainError("infeasible prior: ||x_T - mu_T||_inf = " + std::to_string(dev) +
                      " exceeds rho = " + std::to_string(rho_));
  }
}

Method Method::weighted_l1(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("weighted-l1 gamma must be positive");
  return {Kind::WeightedL1, gamma};
}

std::string Method::name() const {
  switch (kind) {
    case Kind::BP: return "bp";
    case Kind::ModCS: return "modcs";
    case Kind::WeightedL1: return "weighted_l1";
    case Kind::RegModBP: return "regmodbp";
  }
  return "?";
}

Method Method::parse(const std::string& name, double gamma) {
  if (name == "bp") return bp();
  if (name == "modcs") return modcs();
  if (name == "weighted_l1" || name == "weighted") return weighted_l1(gamma);
  if (name == "regmodbp") return regmodbp();
  throw DomainError("unknown method '" + name + "'");
}

Vector ReducedLP::extract(std::span<const double> solution) const {
  Vector beta(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    beta[i] = solution[pos[i]];
    if (neg[i] != npos) beta[i] -= solution[neg[i]];
  }
  return beta;
}

namespace {

/// cost[i] > 0: split coordinate with that l1 weight; cost[i] == 0: single
/// variable bounded by [lo[i], hi[i]].
ReducedLP build(const RecoveryInstance& inst, const Vector& cost, const Vector& lo, const Vector& hi) {
  const std::size_t m = inst.m();
  const std::size_t n = inst.n();
  ReducedLP r;
  r.pos.resize(m);
  r.neg.assign(m, ReducedLP::npos);
  std::size_t vars = 0;
  for (std::size_t i = 0; i < m; ++i) {
    r.pos[i] = vars++;
    if (cost[i] > 0.0) r.neg[i] = vars++;
  }
  StandardLP& lp = r.lp;
  lp.objective.assign(vars, 0.0);
  lp.lower.assign(vars, 0.0);
  lp.upper.assign(vars, kInf);
  lp.a_eq = DenseMatrix(n, vars);
  lp.b_eq = inst.y;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t p = r.pos[i];
    if (r.neg[i] != ReducedLP::npos) {
      const std::size_t q = r.neg[i];
      lp.objective[p] = lp.objective[q] = cost[i];
      for (std::size_t row = 0; row < n; ++row) {
        lp.a_eq(row, p) = inst.a(row, i);
        lp.a_eq(row, q) = -inst.a(row, i);
      }
    } else {
      lp.lower[p] = lo[i];
      lp.upper[p] = hi[i];
      for (std::size_t row = 0; row < n; ++row) lp.a_eq(row, p) = inst.a(row, i);
    }
  }
  return r;
}

}  // namespace

ReducedLP reduce_bp(const RecoveryInstance& inst) {
  const std::size_t m = inst.m();
  return build(inst, Vector(m, 1.0), Vector(m, -kInf), Vector(m, kInf));
}

ReducedLP reduce_modcs(const RecoveryInstance& inst, const PriorKnowledge& prior) {
  const std::size_t m = inst.m();
  Vector cost(m, 1.0);
  for (std::size_t i : prior.t()) cost[i] = 0.0;
  return build(inst, cost, Vector(m, -kInf), Vector(m, kInf));
}

ReducedLP reduce_weighted_l1(const RecoveryInstance& inst, const PriorKnowledge& prior, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("weighted-l1 gamma must be positive");
  const std::size_t m = inst.m();
  Vector cost(m, 1.0);
  for (std::size_t i : prior.t()) cost[i] = gamma;
  return build(inst, cost, Vector(m, -kInf), Vector(m, kInf));
}

ReducedLP reduce_regmodbp(const RecoveryInstance& inst, const PriorKnowledge& prior) {
  if (inst.x_true) prior.require_feasible(*inst.x_true);
  const std::size_t m = inst.m();
  Vector cost(m, 1.0);
  Vector lo(m, -kInf);
  Vector hi(m, kInf);
  const double rho = prior.rho();
  for (std::size_t k = 0; k < prior.k(); ++k) {
    const std::size_t i = prior.t()[k];
    cost[i] = 0.0;
    if (std::isfinite(rho)) {
      lo[i] = prior.mu_hat_t()[k] - rho;
      hi[i] = prior.mu_hat_t()[k] + rho;
    }
  }
  return build(inst, cost, lo, hi);
}

ReducedLP reduce(const RecoveryInstance& inst, const PriorKnowledge* prior, const Method& method) {
  if (method.kind != Method::Kind::BP && prior == nullptr) {
    throw DomainError(method.name() + " needs a support estimate");
  }
  switch (method.kind) {
    case Method::Kind::BP: return reduce_bp(inst);
    case Method::Kind::ModCS: return reduce_modcs(inst, *prior);
    case Method::Kind::WeightedL1: return reduce_weighted_l1(inst, *prior, method.gamma);
    case Method::Kind::RegModBP: return reduce_regmodbp(inst, *prior);
  }
  throw DomainError("unknown method");
}

Vector recover(const RecoveryInstance& inst, const PriorKnowledge* prior, const Method& method,
               const SimplexOptions& opts) {
  const ReducedLP r = reduce(inst, prior, method);
  const LPOutcome out = solve_lp(r.lp, opts);
  if (out.status == LPStatus::Infeasible) throw DomainError(method.name() + ": LP is infeasible");
  if (out.status == LPStatus::Unbounded) {
    throw DomainError(method.name() + ": LP reported unbounded (internal error, objective is bounded below)");
  }
  return r.extract(out.solution);
}

std::vector<int> sign_pattern(std::span<const double> b) {
  std::vector<int> s(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (std::abs(b[i]) < 1e-14) s[i] = 0;
    else s[i] = b[i] > 0.0 ? 1 : -1;
  }
  return s;
}

Vector clip_0_7(std::span<const double> b) {
  Vector out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = std::min(7.0, std::max(0.0, b[i]));
  return out;
}

double relative_error(std::span<const double> xhat, std::span<const double> x) {
  if (xhat.size() != x.size()) throw DomainError("relative_error: length mismatch");
  const double nx = norm2(x);
  if (nx == 0.0) throw DomainError("relative_error: true signal is zero");
  Vector d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = xhat[i] - x[i];
  return norm2(d) / nx;
}

bool is_exact(std::span<const double> xhat, std::span<const double> x) {
  return relative_error(xhat, x) < kExactThreshold;
}

}  // namespace regbp
