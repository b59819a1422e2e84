#include "regbp/rip.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <thread>

namespace regbp {

std::uint64_t matrix_fingerprint(const DenseMatrix& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t dims[2] = {a.rows(), a.cols()};
  feed(dims, sizeof dims);
  for (double v : a.data()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    feed(&bits, sizeof bits);
  }
  return h;
}

double binomial(std::size_t m, std::size_t s) {
  if (s > m) return 0.0;
  s = std::min(s, m - s);
  double r = 1.0;
  for (std::size_t i = 1; i <= s; ++i) r = r * static_cast<double>(m - s + i) / static_cast<double>(i);
  return std::round(r);
}

namespace {

// Largest eigenvalue of a small symmetric matrix held row-major in g (n x n),
// destroyed in the process.
double lambda_max_inplace(std::vector<double>& g, std::size_t n) {
  if (n == 1) return g[0];
  if (n == 2) {
    const double a = g[0], b = g[1], d = g[3];
    return 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  }
  double fro = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) fro += g[i] * g[i];
  const double target = 1e-28 * fro;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * g[p * n + q] * g[p * n + q];
    if (off <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = g[p * n + q];
        if (apq == 0.0) continue;
        const double tau = (g[q * n + q] - g[p * n + p]) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = g[k * n + p], akq = g[k * n + q];
          g[k * n + p] = c * akp - s * akq;
          g[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = g[p * n + k], aqk = g[q * n + k];
          g[p * n + k] = c * apk - s * aqk;
          g[q * n + k] = s * apk + c * aqk;
        }
        g[p * n + q] = g[q * n + p] = 0.0;
      }
    }
  }
  double mx = g[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, g[i * n + i]);
  return mx;
}

// Exact-size maxima for one enumeration pass.
struct Levels {
  std::size_t smax = 0;
  std::vector<double> delta;  // exact size s
  std::vector<double> theta;  // exact sizes (s1, s2), (smax+1)^2

  explicit Levels(std::size_t s) : smax(s), delta(s + 1, 0.0), theta((s + 1) * (s + 1), 0.0) {}
  double& th(std::size_t a, std::size_t b) { return theta[a * (smax + 1) + b]; }
  void merge(const Levels& o) {
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = std::max(delta[i], o.delta[i]);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = std::max(theta[i], o.theta[i]);
  }
};

// Combination of the given rank in lexicographic order (combinatorial number system).
std::vector<std::size_t> unrank(double rank, std::size_t m, std::size_t s) {
  std::vector<std::size_t> c(s);
  std::size_t next = 0;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t v = next;; ++v) {
      const double count = binomial(m - v - 1, s - i - 1);
      if (rank < count) {
        c[i] = v;
        next = v + 1;
        break;
      }
      rank -= count;
    }
  }
  return c;
}

bool next_combination(std::vector<std::size_t>& c, std::size_t m) {
  const std::size_t s = c.size();
  for (std::size_t i = s; i-- > 0;) {
    if (c[i] < m - s + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct Request {
  std::size_t s_lo = 1;
  std::size_t s_hi = 1;
  bool deltas = true;
  bool thetas = true;
  std::size_t only_s1 = 0;  // when nonzero, only splits with this smaller side size
};

void scan_range(const DenseMatrix& g, std::size_t s, double first, double count, const Request& req, Levels& out) {
  const std::size_t m = g.rows();
  std::vector<std::size_t> c = unrank(first, m, s);
  std::vector<double> buf(s * s);
  std::vector<std::size_t> t1, t2;
  for (double done = 0; done < count; ++done) {
    if (req.deltas) {
      DenseMatrix sub(s, s);
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) sub(i, j) = g(c[i], c[j]);
      const Vector ev = sym_eigvals(sub);
      out.delta[s] = std::max(out.delta[s], std::max(ev.back() - 1.0, 1.0 - ev.front()));
    }
    if (req.thetas && s >= 2) {
      const std::uint64_t full = (std::uint64_t{1} << s) - 1;
      for (std::uint64_t mask = 1; mask < full; ++mask) {
        const std::size_t s1 = static_cast<std::size_t>(std::popcount(mask));
        const std::size_t s2 = s - s1;
        if (s1 > s2) continue;
        if (s1 == s2 && !(mask & 1)) continue;  // the complementary mask covers it
        if (req.only_s1 != 0 && s1 != req.only_s1) continue;
        t1.clear();
        t2.clear();
        for (std::size_t i = 0; i < s; ++i) ((mask >> i) & 1 ? t1 : t2).push_back(c[i]);
        // lambda_max(B B') with B = G[t1, t2]
        for (std::size_t i = 0; i < s1; ++i) {
          for (std::size_t j = i; j < s1; ++j) {
            double v = 0.0;
            for (std::size_t k : t2) v += g(t1[i], k) * g(t1[j], k);
            buf[i * s1 + j] = buf[j * s1 + i] = v;
          }
        }
        const double sigma = std::sqrt(std::max(0.0, lambda_max_inplace(buf, s1)));
        double& slot = out.th(s1, s2);
        slot = std::max(slot, sigma);
      }
    }
    if (!next_combination(c, m)) break;
  }
}

Levels enumerate(const DenseMatrix& a, const Request& req, std::size_t workers) {
  const DenseMatrix g = gram(a);
  Levels total(req.s_hi);
  workers = std::max<std::size_t>(1, workers);
  for (std::size_t s = req.s_lo; s <= req.s_hi; ++s) {
    const double n = binomial(a.cols(), s);
    const std::size_t w = static_cast<std::size_t>(std::min<double>(static_cast<double>(workers), n));
    if (w <= 1) {
      scan_range(g, s, 0, n, req, total);
      continue;
    }
    std::vector<Levels> parts(w, Levels(req.s_hi));
    std::vector<std::thread> pool;
    const double chunk = std::ceil(n / static_cast<double>(w));
    for (std::size_t t = 0; t < w; ++t) {
      const double first = chunk * static_cast<double>(t);
      const double count = std::min(chunk, n - first);
      if (count <= 0) continue;
      pool.emplace_back([&, t, first, count] { scan_range(g, s, first, count, req, parts[t]); });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : parts) total.merge(p);
  }
  return total;
}

void check_cap(const DenseMatrix& a, std::size_t s_max) {
  const std::size_t m = a.cols();
  if (m > kRipColumnCap) {
    std::ostringstream msg;
    msg << "enumeration too large: " << m << " columns exceed the cap of " << kRipColumnCap << " (C(" << m << ","
        << std::min(s_max, m) << ") = " << binomial(m, std::min(s_max, m)) << " supports at the top order)";
    throw DomainError(msg.str());
  }
  if (s_max > m) {
    throw DomainError("order " + std::to_string(s_max) + " exceeds the " + std::to_string(m) + " matrix columns");
  }
  double work = 0.0;
  for (std::size_t s = 1; s <= s_max; ++s) work += binomial(m, s) * std::ldexp(1.0, static_cast<int>(s) - 1);
  if (work > kRipWorkBudget) {
    std::ostringstream msg;
    msg << "enumeration too large: C(" << m << "," << s_max << ") = " << binomial(m, s_max) << " supports, "
        << work << " support splits in total";
    throw DomainError(msg.str());
  }
}

}  // namespace

RipTable RipTable::compute(const DenseMatrix& a, std::size_t s_max, std::size_t workers) {
  check_cap(a, s_max);
  RipTable t;
  t.s_max_ = s_max;
  t.cols_ = a.cols();
  t.fingerprint_ = matrix_fingerprint(a);
  t.delta_.assign(s_max + 1, 0.0);
  t.theta_.assign((s_max + 1) * (s_max + 1), 0.0);
  if (s_max == 0) return t;

  Request req;
  req.s_lo = 1;
  req.s_hi = s_max;
  Levels lv = enumerate(a, req, workers);

  for (std::size_t s = 1; s <= s_max; ++s) t.delta_[s] = std::max(t.delta_[s - 1], lv.delta[s]);
  const std::size_t w = s_max + 1;
  for (std::size_t s1 = 1; s1 <= s_max; ++s1) {
    for (std::size_t s2 = 1; s1 + s2 <= s_max; ++s2) {
      double v = std::max(lv.th(std::min(s1, s2), std::max(s1, s2)), 0.0);
      v = std::max(v, t.theta_[(s1 - 1) * w + s2]);
      v = std::max(v, t.theta_[s1 * w + s2 - 1]);
      t.theta_[s1 * w + s2] = v;
    }
  }
  return t;
}

double RipTable::delta(std::size_t s) const {
  if (s > s_max_) {
    throw DomainError("RIP table covers orders up to " + std::to_string(s_max_) + ", delta_" + std::to_string(s) +
                      " requested");
  }
  return delta_[s];
}

double RipTable::theta(std::size_t s1, std::size_t s2) const {
  if (s1 + s2 > s_max_) {
    throw DomainError("RIP table covers orders up to " + std::to_string(s_max_) + ", theta_{" + std::to_string(s1) +
                      "," + std::to_string(s2) + "} requested");
  }
  return theta_[s1 * (s_max_ + 1) + s2];
}

double ric(const DenseMatrix& a, std::size_t s) {
  if (s == 0 || s > a.cols()) throw DomainError("ric: order must lie in [1, cols]");
  check_cap(a, s);
  Request req;
  req.s_lo = req.s_hi = s;
  req.thetas = false;
  return enumerate(a, req, 1).delta[s];
}

double roc(const DenseMatrix& a, std::size_t s1, std::size_t s2) {
  if (s1 == 0 || s2 == 0) return 0.0;
  if (s1 + s2 > a.cols()) throw DomainError("roc: s1 + s2 exceeds the column count");
  check_cap(a, s1 + s2);
  Request req;
  req.s_lo = req.s_hi = s1 + s2;
  req.deltas = false;
  req.only_s1 = std::min(s1, s2);
  Levels lv = enumerate(a, req, 1);
  return lv.th(std::min(s1, s2), std::max(s1, s2));
}

double a_fn(const RipTable& t, std::size_t k, std::size_t s, std::size_t sc) {
  const double dk = t.delta(k);
  if (!(dk < 1.0)) throw DomainError("condition violated: delta_" + std::to_string(k) + " >= 1");
  const double tsk = t.theta(s, k);
  const double den = 1.0 - t.delta(s) - tsk * tsk / (1.0 - dk);
  if (!(den > 0.0)) throw DomainError("condition violated: a_k(s, s') denominator is not positive");
  return (t.theta(sc, s) + t.theta(sc, k) * tsk / (1.0 - dk)) / den;
}

double k_fn(const RipTable& t, std::size_t k, std::size_t u) {
  const double dk = t.delta(k);
  if (!(dk < 1.0)) throw DomainError("condition violated: delta_" + std::to_string(k) + " >= 1");
  const double tuk = t.theta(u, k);
  const double du = t.delta(u);
  const double den = 1.0 - du - tuk * tuk / (1.0 - dk);
  if (!(den > 0.0)) throw DomainError("condition violated: K_k(u) denominator is not positive");
  return std::sqrt(1.0 + du) / den;
}

std::size_t condition_order(std::size_t k, std::size_t u) { return std::max(k + 2 * u, 3 * u); }

ConditionReport theorem1_conditions(const RipTable& t, std::size_t k, std::size_t u, std::size_t k_b) {
  if (k_b > k) throw DomainError("k_b exceeds k");
  const std::size_t need = condition_order(k, u);
  if (need > t.s_max()) {
    throw DomainError("RIP table covers orders up to " + std::to_string(t.s_max()) + ", conditions need " +
                      std::to_string(need));
  }
  ConditionReport r;
  r.k = k;
  r.u = u;
  r.k_b = k_b;
  auto add = [&r](std::string name, double lhs) {
    ConditionCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.margin = c.threshold - lhs;
    c.pass = lhs < c.threshold;
    r.checks.push_back(std::move(c));
  };
  add("delta_{k+u}", t.delta(k + u));
  const double th = t.theta(k, 2 * u);
  add("delta_{2u} + delta_k + theta_{k,2u}^2", t.delta(2 * u) + t.delta(k) + th * th);
  double lhs;
  try {
    lhs = a_fn(t, k, 2 * u, u) + a_fn(t, k_b, u, u);
  } catch (const DomainError&) {
    lhs = std::numeric_limits<double>::infinity();
  }
  add("a_k(2u,u) + a_{k_b}(u,u)", lhs);
  r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const ConditionCheck& c) { return c.pass; });
  return r;
}

}  // namespace regbp
