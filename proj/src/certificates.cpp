#include "regbp/certificates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace regbp {

ActivePartition classify_active(std::span<const double> x, const PriorKnowledge& prior, std::optional<double> tol) {
  if (x.size() != prior.m()) throw DomainError("signal length does not match prior");
  const double rho = prior.rho();
  const double eps = tol.value_or(prior.rho_tolerance());
  std::vector<std::size_t> plus, minus, inner;
  for (std::size_t k = 0; k < prior.k(); ++k) {
    const std::size_t i = prior.t()[k];
    const double d = x[i] - prior.mu_hat_t()[k];
    const bool up = std::isfinite(rho) && std::abs(d - rho) <= eps;
    const bool down = std::isfinite(rho) && std::abs(d + rho) <= eps;
    if (up && down) throw DomainError("rho below tolerance: index " + std::to_string(i) + " is active on both sides");
    (up ? plus : down ? minus : inner).push_back(i);
  }
  return {IndexSet::from_unsorted(std::move(plus)), IndexSet::from_unsorted(std::move(minus)),
          IndexSet::from_unsorted(std::move(inner))};
}

namespace {

std::vector<double> to_real(std::span<const int> s) { return {s.begin(), s.end()}; }

// The vector in range(A_C), C = zero ++ target, with A_zero'w = 0 and
// A_target'w = c. Equals M(zero) A_target (A_target' M(zero) A_target)^{-1} c.
Vector interpolate(const DenseMatrix& a, const IndexSet& zero, const IndexSet& target, std::span<const double> c) {
  if (c.size() != target.size()) throw DomainError("coefficient length does not match the target set");
  if (!disjoint(zero, target)) throw DomainError("interpolation sets overlap");
  std::vector<std::size_t> cols(zero.begin(), zero.end());
  cols.insert(cols.end(), target.begin(), target.end());
  const std::size_t n = a.rows();
  if (cols.empty()) return Vector(n, 0.0);
  for (std::size_t j : cols)
    if (j >= a.cols()) throw DomainError("column index out of range");
  DenseMatrix ac(n, cols.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < cols.size(); ++k) ac(r, k) = a(r, cols[k]);
  Vector rhs(cols.size(), 0.0);
  std::copy(c.begin(), c.end(), rhs.begin() + static_cast<std::ptrdiff_t>(zero.size()));
  Vector v;
  try {
    v = Cholesky(gram(ac)).solve(rhs);
  } catch (const NotPositiveDefinite&) {
    throw DomainError("columns on the interpolation sets are linearly dependent (hypothesis violated)");
  }
  return ac * v;
}

double try_a(const RipTable& t, std::size_t k, std::size_t s, std::size_t sc) {
  try {
    return a_fn(t, k, s, sc);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

IndexSet exceptional_set(const DenseMatrix& a, std::span<const double> w, const IndexSet& excluded, double bound) {
  const Vector corr = mul_transpose(a, w);
  std::vector<std::size_t> e;
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (!excluded.contains(j) && std::abs(corr[j]) > bound) e.push_back(j);
  return IndexSet::from_unsorted(std::move(e));
}

double restricted_norm(const DenseMatrix& a, std::span<const double> w, const IndexSet& s) {
  Vector v;
  for (std::size_t j : s) {
    double acc = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) acc += a(r, j) * w[r];
    v.push_back(acc);
  }
  return norm2(v);
}

}  // namespace

Vector lemma2_w(const DenseMatrix& a, const IndexSet& t_b, const IndexSet& delta, std::span<const int> sgn_delta) {
  if (sgn_delta.size() != delta.size()) throw DomainError("sign vector length does not match delta");
  const Vector c = to_real(sgn_delta);
  return interpolate(a, t_b, delta, c);
}

WitnessResult good_set_witness(const DenseMatrix& a, const IndexSet& t, const IndexSet& t_b, const IndexSet& delta,
                    std::span<const int> sgn_delta, const RipTable& table, std::size_t sc) {
  if (sc == 0) throw DomainError("witness: sc must be positive");
  if (!is_subset(t_b, t)) throw DomainError("witness: T_b must be a subset of T");
  const std::size_t kb = t_b.size();
  const std::size_t u = delta.size();
  const double th = table.theta(kb, u);
  if (!(table.delta(u) + table.delta(kb) + th * th < 1.0)) {
    throw DomainError("witness hypothesis violated: delta_u + delta_kb + theta_{kb,u}^2 >= 1");
  }
  WitnessResult r;
  r.w = lemma2_w(a, t_b, delta, sgn_delta);
  r.a_value = a_fn(table, kb, u, sc);
  r.k_value = k_fn(table, kb, u);
  r.column_bound = r.a_value * std::sqrt(static_cast<double>(u)) / std::sqrt(static_cast<double>(sc));
  r.exceptional = exceptional_set(a, r.w, set_union(t, delta), r.column_bound);
  return r;
}

namespace {

struct GramView {
  IndexSet cols;  // T and delta
  DenseMatrix g;
  std::size_t pos(std::size_t j) const {
    return static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), j) - cols.begin());
  }
};

// A_i'w for the candidate good set; empty when the candidate fails.
bool candidate_passes(const GramView& gv, const IndexSet& t, const IndexSet& good, const IndexSet& plus,
                      const IndexSet& delta, std::span<const double> sgn, Vector* coef) {
  const IndexSet bad = set_difference(t, good);
  std::vector<std::size_t> c(bad.begin(), bad.end());
  c.insert(c.end(), delta.begin(), delta.end());
  const std::size_t nc = c.size();
  std::vector<std::size_t> p(nc);
  for (std::size_t i = 0; i < nc; ++i) p[i] = gv.pos(c[i]);
  DenseMatrix gcc(nc, nc);
  for (std::size_t i = 0; i < nc; ++i)
    for (std::size_t j = 0; j < nc; ++j) gcc(i, j) = gv.g(p[i], p[j]);
  Vector rhs(nc, 0.0);
  std::copy(sgn.begin(), sgn.end(), rhs.begin() + static_cast<std::ptrdiff_t>(bad.size()));
  const Vector v = Cholesky(gcc).solve(rhs);
  for (std::size_t i : good) {
    const std::size_t pi = gv.pos(i);
    double corr = 0.0;
    for (std::size_t k = 0; k < nc; ++k) corr += gv.g(pi, p[k]) * v[k];
    const bool ok = plus.contains(i) ? corr > kGoodSetMargin : corr < -kGoodSetMargin;
    if (!ok) return false;
  }
  if (coef) *coef = v;
  return true;
}

bool next_combo(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t s = c.size();
  for (std::size_t i = s; i-- > 0;) {
    if (c[i] < n - s + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

GoodSetResult good_set_search(const DenseMatrix& a, const ActivePartition& part, const IndexSet& delta,
                              std::span<const int> sgn_delta, const GoodSetOptions& opts) {
  if (sgn_delta.size() != delta.size()) throw DomainError("sign vector length does not match delta");
  const IndexSet t = part.t();
  if (!disjoint(t, delta)) throw DomainError("delta must be disjoint with T");
  const IndexSet active = part.active();
  GoodSetResult res;
  res.bad = t;
  res.k_b = t.size();

  GramView gv{set_union(t, delta), {}};
  gv.g = gram(submatrix_cols(a, gv.cols));
  try {
    Cholesky check(gv.g);
  } catch (const NotPositiveDefinite&) {
    throw DomainError("columns of T and delta are linearly dependent (delta_{k+u} >= 1)");
  }
  const Vector sgn = to_real(sgn_delta);
  auto finish = [&](const IndexSet& good) {
    res.plus_good = set_intersection(good, part.plus);
    res.minus_good = set_intersection(good, part.minus);
    res.bad = set_difference(t, good);
    res.k_b = res.bad.size();
    res.w = lemma2_w(a, res.bad, delta, sgn_delta);
    return res;
  };

  if (active.size() > opts.max_active) {
    res.searched = false;
    return res;
  }
  if (delta.empty()) return finish({});  // w = 0 meets no strict sign

  const std::size_t na = active.size();
  for (std::size_t size = na; size >= 1; --size) {
    // Enumerate size-`size` subsets of `active` in lexicographic order.
    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    auto make = [&](const std::vector<std::size_t>& c) {
      std::vector<std::size_t> v;
      v.reserve(c.size());
      for (std::size_t i : c) v.push_back(active[i]);
      return IndexSet::from_unsorted(std::move(v));
    };
    if (workers == 1) {
      std::vector<std::size_t> c(size);
      for (std::size_t i = 0; i < size; ++i) c[i] = i;
      do {
        const IndexSet good = make(c);
        if (candidate_passes(gv, t, good, part.plus, delta, sgn, nullptr)) return finish(good);
      } while (next_combo(c, na));
      continue;
    }
    // Parallel: worker w takes ranks congruent to w; the smallest passing rank wins.
    std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
    std::vector<std::thread> pool;
    for (std::size_t wk = 0; wk < workers; ++wk) {
      pool.emplace_back([&, wk] {
        std::vector<std::size_t> c(size);
        for (std::size_t i = 0; i < size; ++i) c[i] = i;
        std::uint64_t rank = 0;
        do {
          if (rank >= best.load()) return;
          if (rank % workers == wk) {
            const IndexSet good = make(c);
            if (candidate_passes(gv, t, good, part.plus, delta, sgn, nullptr)) {
              std::uint64_t cur = best.load();
              while (rank < cur && !best.compare_exchange_weak(cur, rank)) {
              }
              return;
            }
          }
          ++rank;
        } while (next_combo(c, na));
      });
    }
    for (auto& th : pool) th.join();
    if (best.load() != std::numeric_limits<std::uint64_t>::max()) {
      std::vector<std::size_t> c(size);
      for (std::size_t i = 0; i < size; ++i) c[i] = i;
      for (std::uint64_t r = 0; r < best.load(); ++r) next_combo(c, na);
      return finish(make(c));
    }
  }
  return finish({});
}

InterpolationResult lemma3_w(const DenseMatrix& a, const IndexSet& t, const IndexSet& t_d, std::span<const double> c,
                      const RipTable& table, std::size_t sc, std::optional<std::size_t> s, bool force) {
  if (sc == 0) throw DomainError("interpolation: sc must be positive");
  if (c.size() != t_d.size()) throw DomainError("interpolation: c length does not match T_d");
  if (!disjoint(t, t_d)) throw DomainError("interpolation: T_d must be disjoint with T");
  const std::size_t k = t.size();
  const std::size_t order = s.value_or(t_d.size());
  if (order < t_d.size()) throw DomainError("interpolation: s is smaller than |T_d|");
  InterpolationResult r;
  const double th = table.theta(k, order);
  r.hypothesis = table.delta(order) + table.delta(k) + th * th < 1.0;
  if (!r.hypothesis && !force) {
    throw DomainError("interpolation hypothesis violated: delta_s + delta_k + theta_{k,s}^2 >= 1");
  }
  const double cn = norm2(c);
  if (cn == 0.0) {
    r.w.assign(a.rows(), 0.0);
    r.a_value = try_a(table, k, order, sc);
    return r;
  }
  r.w = interpolate(a, t, t_d, c);
  r.a_value = try_a(table, k, order, sc);
  if (std::isnan(r.a_value)) {
    if (!force) throw DomainError("condition violated: a_k(s, s') undefined");
    r.threshold = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.threshold = r.a_value * cn / std::sqrt(static_cast<double>(sc));
  r.exceptional = exceptional_set(a, r.w, set_union(t, t_d), r.threshold);
  return r;
}

CertificateReport verify_lemma1(const DenseMatrix& a, std::span<const double> w, const ActivePartition& part,
                                const IndexSet& delta, std::span<const int> sgn_delta,
                                std::optional<double> delta_ku) {
  if (w.size() != a.rows()) throw DomainError("w length does not match the matrix rows");
  if (sgn_delta.size() != delta.size()) throw DomainError("sign vector length does not match delta");
  const Vector corr = mul_transpose(a, w);
  CertificateReport rep;
  rep.w.assign(w.begin(), w.end());
  auto add = [&rep](std::string name, double value, double limit, bool pass) {
    rep.checks.push_back({std::move(name), value, limit, pass});
  };

  double inner = 0.0, plus = 0.0, minus = 0.0, interp = 0.0, off = 0.0;
  for (std::size_t i : part.inner) inner = std::max(inner, std::abs(corr[i]));
  for (std::size_t i : part.plus) plus = std::max(plus, -corr[i]);
  for (std::size_t i : part.minus) minus = std::max(minus, corr[i]);
  for (std::size_t k = 0; k < delta.size(); ++k)
    interp = std::max(interp, std::abs(corr[delta[k]] - static_cast<double>(sgn_delta[k])));
  const IndexSet support = set_union(part.t(), delta);
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (!support.contains(j)) off = std::max(off, std::abs(corr[j]));

  add("max |A_i'w| on T_in", inner, kCertificateTol, inner <= kCertificateTol);
  add("max -A_i'w on T_a+", plus, kCertificateTol, plus <= kCertificateTol);
  add("max A_i'w on T_a-", minus, kCertificateTol, minus <= kCertificateTol);
  add("max |A_i'w - sgn(x_i)| on delta", interp, kCertificateTol, interp <= kCertificateTol);
  add("max |A_j'w| off T and delta", off, 1.0 - kCertificateTol, off < 1.0 - kCertificateTol);
  if (delta_ku) {
    add("delta_{k+u}", *delta_ku, 1.0, *delta_ku < 1.0);
  } else {
    bool full = true;
    try {
      if (!support.empty()) Cholesky check(gram(submatrix_cols(a, support)));
    } catch (const NotPositiveDefinite&) {
      full = false;
    }
    add("A on T and delta has full column rank", full ? 0.0 : 1.0, 1.0, full);
  }
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CertificateCheck& c) { return c.pass; });
  return rep;
}

CertificateReport build_certificate(const DenseMatrix& a, const ActivePartition& part, const GoodSetResult& good,
                                    const IndexSet& delta, std::span<const int> sgn_delta, const RipTable& table,
                                    const CertificateOptions& opts) {
  const IndexSet t = part.t();
  const std::size_t k = t.size();
  const std::size_t u = delta.size();
  const ConditionReport cond = theorem1_conditions(table, k, u, good.k_b);
  if (!cond.pass && !opts.force) {
    throw DomainError("recovery conditions fail; the certificate is only built in force mode");
  }
  const std::optional<double> delta_ku = table.delta(k + u);
  if (u == 0) {
    CertificateReport rep = verify_lemma1(a, Vector(a.rows(), 0.0), part, delta, sgn_delta, delta_ku);
    rep.forced = !cond.pass;
    return rep;
  }

  const Vector w1 = lemma2_w(a, good.bad, delta, sgn_delta);
  const double a0 = try_a(table, good.k_b, u, u);
  const IndexSet excluded = set_union(t, delta);
  IndexSet td_prev = std::isnan(a0) ? IndexSet{} : exceptional_set(a, w1, excluded, a0);
  const double ratio = try_a(table, k, 2 * u, u);

  Vector w = w1;
  Vector w_prev = w1;
  std::vector<double> residuals{restricted_norm(a, w1, td_prev)};
  std::vector<double> norms{norm2(w1)};
  bool ratio_ok = true;
  bool converged = true;
  double sign = 1.0;
  std::size_t terms = 1;

  while (!td_prev.empty() && norms.back() >= opts.tol_series) {
    if (terms >= opts.max_iters) {
      converged = false;
      break;
    }
    const IndexSet td = set_union(delta, td_prev);
    Vector c(td.size(), 0.0);
    const Vector corr = mul_transpose(a, w_prev);
    for (std::size_t q = 0; q < td.size(); ++q)
      if (!delta.contains(td[q])) c[q] = corr[td[q]];
    const InterpolationResult l3 = lemma3_w(a, t, td, c, table, u, 2 * u, opts.force);
    sign = -sign;
    for (std::size_t r = 0; r < w.size(); ++r) w[r] += sign * l3.w[r];
    ++terms;
    const double res = restricted_norm(a, l3.w, l3.exceptional);
    if (!std::isnan(ratio) && res > (ratio + 1e-9) * residuals.back()) ratio_ok = false;
    residuals.push_back(res);
    norms.push_back(norm2(l3.w));
    td_prev = l3.exceptional;
    w_prev = l3.w;
  }
  if (std::isnan(ratio)) ratio_ok = false;
  if (cond.pass && (!ratio_ok || !converged)) {
    throw DomainError("internal inconsistency: certificate series did not decay under passing conditions");
  }

  CertificateReport rep = verify_lemma1(a, w, part, delta, sgn_delta, delta_ku);
  rep.terms = terms;
  rep.residuals = std::move(residuals);
  rep.term_norms = std::move(norms);
  rep.ratio_bound = ratio;
  rep.ratio_ok = ratio_ok;
  rep.converged = converged;
  rep.forced = !cond.pass;
  return rep;
}

Certification certify(const RecoveryInstance& inst, const PriorKnowledge& prior, bool force, std::size_t workers) {
  if (!inst.x_true) throw DomainError("certification needs the true signal");
  const Vector& x = *inst.x_true;
  prior.require_feasible(x);
  Certification out;
  out.partition = classify_active(x, prior);
  out.delta = prior.misses(inst.support);
  out.extras = prior.extras(inst.support);
  const Vector xd = subvector(x, out.delta);
  const std::vector<int> sgn = sign_pattern(xd);
  const std::size_t k = prior.k();
  const std::size_t u = out.delta.size();

  GoodSetOptions gopts;
  gopts.max_active = 64;
  gopts.workers = workers;
  bool rank_ok = true;
  try {
    out.good = good_set_search(inst.a, out.partition, out.delta, sgn, gopts);
  } catch (const DomainError&) {
    rank_ok = false;
    out.good.bad = prior.t();
    out.good.k_b = k;
    out.good.searched = false;
  }
  const RipTable table = RipTable::compute(inst.a, condition_order(k, u), workers);
  out.conditions = theorem1_conditions(table, k, u, out.good.k_b);
  if (rank_ok && (out.conditions.pass || force)) {
    CertificateOptions copts;
    copts.force = force;
    try {
      out.certificate = build_certificate(inst.a, out.partition, out.good, out.delta, sgn, table, copts);
    } catch (const DomainError&) {
      if (out.conditions.pass) throw;
    }
  }
  const bool certified = out.conditions.pass && out.certificate && out.certificate->pass;
  out.verdict = certified ? "certified" : "inconclusive";
  return out;
}

}  // namespace regbp
