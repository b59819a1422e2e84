#include "regbp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "regbp/certificates.hpp"
#include "regbp/csv.hpp"

namespace regbp {

namespace {

constexpr std::uint64_t kMatrixStream = std::uint64_t{1} << 63;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Calls f(i) for i in [0, count) on up to `workers` threads; f must write
// only to slot i of its outputs.
template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& f) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string short_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string Scenario::name() const {
  switch (kind) {
    case Kind::Quantized: return "quantized";
    case Kind::ThreeBit: return "three_bit";
    case Kind::Continuous: return "continuous";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (m == 0) throw DomainError("config: m must be positive");
  if (support_size + u > m) throw DomainError("config: support_size + u exceeds m");
  if (u > support_size) throw DomainError("config: u exceeds support_size");
  if (trials == 0) throw DomainError("config: trials must be at least 1");
  for (std::size_t n : n_values)
    if (n == 0 || n > m) throw DomainError("config: n values must lie in [1, m]");
  for (std::size_t n : n_grid)
    if (n == 0 || n > m) throw DomainError("config: grid values must lie in [1, m]");
  if (!std::is_sorted(n_grid.begin(), n_grid.end())) throw DomainError("config: n grid must be ascending");
  for (double g : gammas)
    if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("config: gammas must be positive");
  if (methods.empty()) throw DomainError("config: no methods");
  if (scenario.kind == Scenario::Kind::Quantized && scenario.levels == 0) throw DomainError("config: K must be >= 1");
  if (scenario.kind != Scenario::Kind::ThreeBit && !(scenario.rho > 0.0 && std::isfinite(scenario.rho))) {
    throw DomainError("config: rho must be positive and finite");
  }
  if (std::count(methods.begin(), methods.end(), Method::Kind::WeightedL1) > 0 && gammas.empty()) {
    throw DomainError("config: weighted_l1 needs at least one gamma");
  }
}

std::vector<std::size_t> default_n_grid(std::size_t m) {
  const std::size_t step = (m + 99) / 100;
  const std::size_t lo = (5 * m + 99) / 100;
  const std::size_t hi = m / 2;
  std::vector<std::size_t> g;
  for (std::size_t n = (lo + step - 1) / step * step; n <= hi; n += step) g.push_back(n);
  if (g.empty()) g.push_back(std::max<std::size_t>(1, hi));
  return g;
}

std::vector<std::size_t> ExperimentConfig::grid() const { return n_grid.empty() ? default_n_grid(m) : n_grid; }

DenseMatrix gen_gaussian_matrix(std::size_t n, std::size_t m, Rng& rng) {
  if (n == 0 || n > m) throw DomainError("gaussian matrix needs 1 <= n <= m");
  DenseMatrix a(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = rng.gaussian();
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
    const double inv = 1.0 / std::sqrt(s);
    for (std::size_t i = 0; i < n; ++i) a(i, j) *= inv;
  }
  return a;
}

SupportDraw gen_support(std::size_t m, std::size_t size_n, std::size_t u, Rng& rng) {
  if (size_n + u > m || u > size_n) throw DomainError("support draw needs |N| + u <= m and u <= |N|");
  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  SupportDraw d;
  d.n = IndexSet::from_unsorted(rng.sample(all, size_n));
  d.delta = IndexSet::from_unsorted(rng.sample(d.n.values(), u));
  d.extras = IndexSet::from_unsorted(rng.sample(complement(d.n, m).values(), u));
  d.t = set_union(set_difference(d.n, d.delta), d.extras);
  return d;
}

namespace {

double pm(Rng& rng, double v) { return rng.below(2) ? v : -v; }

// x = +-1 on N cap T, +-0.1 on delta, drawn in ascending index order.
Vector unit_magnitudes(const SupportDraw& s, std::size_t m, Rng& rng) {
  Vector x(m, 0.0);
  for (std::size_t i : s.n) x[i] = s.delta.contains(i) ? pm(rng, 0.1) : pm(rng, 1.0);
  return x;
}

}  // namespace

SignalDraw gen_signal_quantized(const SupportDraw& s, std::size_t m, std::size_t levels, double rho, Rng& rng) {
  if (levels == 0 || !(rho > 0.0)) throw DomainError("quantized signal needs K >= 1 and rho > 0");
  SignalDraw d;
  d.rho = rho;
  d.x = unit_magnitudes(s, m, rng);
  const auto k = static_cast<std::int64_t>(levels);
  for (std::size_t i : s.t) {
    std::int64_t step;
    if (s.extras.contains(i)) {
      step = static_cast<std::int64_t>(rng.below(2 * levels)) - k;  // -K..K-1, skip 0
      if (step >= 0) ++step;
    } else {
      step = static_cast<std::int64_t>(rng.below(2 * levels + 1)) - k;
    }
    // Exact on the grid endpoints so that active constraints compare equal.
    const double nu = step == k ? rho : step == -k ? -rho : static_cast<double>(step) * rho / static_cast<double>(k);
    d.mu_hat_t.push_back(d.x[i] + nu);
  }
  return d;
}

SignalDraw gen_signal_3bit(const SupportDraw& s, std::size_t m, Rng& rng) {
  SignalDraw d;
  d.rho = 2.0;
  d.x.assign(m, 0.0);
  for (std::size_t i : s.n)
    d.x[i] = s.delta.contains(i) ? 1.0 + static_cast<double>(rng.below(2)) : 3.0 + static_cast<double>(rng.below(5));
  for (std::size_t i : s.t) {
    std::int64_t nu;
    if (s.extras.contains(i)) {
      nu = static_cast<std::int64_t>(rng.below(4)) - 2;
      if (nu >= 0) ++nu;
    } else {
      nu = static_cast<std::int64_t>(rng.below(5)) - 2;
    }
    d.mu_hat_t.push_back(std::clamp(d.x[i] + static_cast<double>(nu), 0.0, 7.0));
  }
  return d;
}

SignalDraw gen_signal_continuous(const SupportDraw& s, std::size_t m, double rho, Rng& rng) {
  if (!(rho > 0.0)) throw DomainError("continuous signal needs rho > 0");
  SignalDraw d;
  d.rho = rho;
  d.x = unit_magnitudes(s, m, rng);
  for (std::size_t i : s.t) d.mu_hat_t.push_back(d.x[i] + rng.uniform(-rho, rho));
  return d;
}

SignalDraw gen_signal(const Scenario& sc, const SupportDraw& s, std::size_t m, Rng& rng) {
  switch (sc.kind) {
    case Scenario::Kind::Quantized: return gen_signal_quantized(s, m, sc.levels, sc.rho, rng);
    case Scenario::Kind::ThreeBit: return gen_signal_3bit(s, m, rng);
    case Scenario::Kind::Continuous: return gen_signal_continuous(s, m, sc.rho, rng);
  }
  throw DomainError("unknown scenario");
}

std::string Variant::label() const {
  if (method.kind != Method::Kind::WeightedL1) return method.name();
  return method.name() + "@" + short_real(method.gamma);
}

DenseMatrix experiment_matrix(const ExperimentConfig& cfg, std::size_t n) {
  Rng rng(cfg.seed, cfg.reuse_matrix ? kMatrixStream : kMatrixStream + n);
  return gen_gaussian_matrix(n, cfg.m, rng);
}

TrialData draw_trial(const ExperimentConfig& cfg, std::size_t trial) {
  Rng rng(cfg.seed, trial);
  TrialData d;
  d.sets = gen_support(cfg.m, cfg.support_size, cfg.u, rng);
  d.signal = gen_signal(cfg.scenario, d.sets, cfg.m, rng);
  return d;
}

namespace {

std::vector<Variant> variants(const ExperimentConfig& cfg) {
  std::vector<Variant> v;
  for (Method::Kind k : cfg.methods) {
    if (k == Method::Kind::WeightedL1) {
      for (double g : cfg.gammas) v.push_back({Method::weighted_l1(g)});
    } else {
      v.push_back({Method{k, 1.0}});
    }
  }
  return v;
}

struct Solved {
  bool exact = false;
  bool failed = false;
  double rel_err = kNaN;
  double err_sq = 0.0;
  double x_sq = 0.0;
};

Solved solve_one(const RecoveryInstance& inst, const PriorKnowledge& prior, const Method& method) {
  Solved s;
  const Vector& x = *inst.x_true;
  try {
    const Vector xhat = recover(inst, &prior, method);
    double e = 0.0, xs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      e += (xhat[i] - x[i]) * (xhat[i] - x[i]);
      xs += x[i] * x[i];
    }
    s.rel_err = relative_error(xhat, x);
    s.exact = s.rel_err < kExactThreshold;
    s.err_sq = e;
    s.x_sq = xs;
  } catch (const DomainError&) {
    s.failed = true;
  }
  return s;
}

struct SetStats {
  std::size_t ta = 0;
  std::optional<std::size_t> tg;
  std::optional<std::size_t> tb;
};

SetStats set_stats(const ExperimentConfig& cfg, const DenseMatrix& a, const TrialData& d, const PriorKnowledge& prior) {
  SetStats st;
  const ActivePartition part = classify_active(d.signal.x, prior);
  st.ta = part.plus.size() + part.minus.size();
  if (!cfg.set_stats || !cfg.scenario.can_activate() || st.ta > cfg.good_set_budget) return st;
  const Vector xd = subvector(d.signal.x, d.sets.delta);
  const std::vector<int> sgn = sign_pattern(xd);
  try {
    GoodSetOptions go;
    go.max_active = cfg.good_set_budget;
    const GoodSetResult g = good_set_search(a, part, d.sets.delta, sgn, go);
    if (g.searched) {
      st.tg = g.plus_good.size() + g.minus_good.size();
      st.tb = g.k_b;
    }
  } catch (const DomainError&) {
    // Gram of T and delta singular (n too small): statistic unavailable.
  }
  return st;
}

struct Unit {
  std::size_t n = 0;
  std::size_t trial = 0;
  SetStats stats;
  std::vector<Solved> solved;  // per variant
};

}  // namespace

NExactRow find_n_exact(const ExperimentConfig& cfg, const Variant& v, const RunOptions& opts) {
  cfg.validate();
  NExactRow row;
  row.method = v.label();
  row.gamma = v.method.kind == Method::Kind::WeightedL1 ? v.method.gamma : 0.0;
  std::vector<TrialData> data(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) data[t] = draw_trial(cfg, t);

  auto all_exact = [&](std::size_t n) {
    const DenseMatrix a = experiment_matrix(cfg, n);
    std::atomic<bool> miss{false};
    parallel_for(cfg.trials, opts.workers, [&](std::size_t t) {
      if (miss.load()) return;
      const TrialData& d = data[t];
      const auto inst = RecoveryInstance::from_signal(a, d.signal.x);
      const PriorKnowledge prior = PriorKnowledge::for_instance(inst, d.sets.t, d.signal.mu_hat_t, d.signal.rho);
      if (!solve_one(inst, prior, v.method).exact) miss = true;
    });
    return !miss.load();
  };

  const std::vector<std::size_t> grid = cfg.grid();
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    if (!all_exact(grid[gi])) continue;
    row.n = grid[gi];
    for (std::size_t gj = gi + 1; gj < std::min(grid.size(), gi + 3); ++gj)
      if (!all_exact(grid[gj])) row.non_monotone = true;
    break;
  }
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  ExperimentResult res;
  res.config = cfg;
  const std::vector<Variant> vars = variants(cfg);
  std::vector<TrialData> data(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) data[t] = draw_trial(cfg, t);

  for (std::size_t n : cfg.n_values) {
    const DenseMatrix a = experiment_matrix(cfg, n);
    std::vector<Unit> units(cfg.trials);
    parallel_for(cfg.trials, opts.workers, [&](std::size_t t) {
      const TrialData& d = data[t];
      const auto inst = RecoveryInstance::from_signal(a, d.signal.x);
      // for_instance rejects any draw outside its own box
      const PriorKnowledge prior = PriorKnowledge::for_instance(inst, d.sets.t, d.signal.mu_hat_t, d.signal.rho);
      Unit& u = units[t];
      u.n = n;
      u.trial = t;
      u.stats = set_stats(cfg, a, d, prior);
      for (const Variant& v : vars) u.solved.push_back(solve_one(inst, prior, v.method));
    });

    for (std::size_t vi = 0; vi < vars.size(); ++vi) {
      const Variant& v = vars[vi];
      CellSummary c;
      c.method = v.label();
      c.gamma = v.method.kind == Method::Kind::WeightedL1 ? v.method.gamma : 0.0;
      c.n = n;
      c.trials = cfg.trials;
      double rel = 0.0, esq = 0.0, xsq = 0.0, ta = 0.0, tg = 0.0, tb = 0.0;
      std::size_t ok = 0, with_tg = 0;
      for (const Unit& u : units) {
        const Solved& s = u.solved[vi];
        TrialRecord r;
        r.method = c.method;
        r.gamma = c.gamma;
        r.n = n;
        r.trial = u.trial;
        r.exact = s.exact;
        r.failed = s.failed;
        r.rel_err = s.rel_err;
        r.err_sq = s.err_sq;
        r.x_sq = s.x_sq;
        r.ta = u.stats.ta;
        r.tg = u.stats.tg;
        r.tb = u.stats.tb;
        res.records.push_back(r);
        c.exact += s.exact ? 1 : 0;
        c.failed += s.failed ? 1 : 0;
        if (!s.failed) {
          ++ok;
          rel += s.rel_err;
          esq += s.err_sq;
          xsq += s.x_sq;
        }
        ta += static_cast<double>(u.stats.ta);
        if (u.stats.tg) {
          ++with_tg;
          tg += static_cast<double>(*u.stats.tg);
          tb += static_cast<double>(*u.stats.tb);
        }
      }
      const double nt = static_cast<double>(cfg.trials);
      c.p_exact = static_cast<double>(c.exact) / nt;
      c.nrmse_mean = ok ? rel / static_cast<double>(ok) : kNaN;
      c.nrmse_agg = ok && xsq > 0.0 ? std::sqrt(esq / xsq) : kNaN;
      c.mean_ta = ta / nt;
      c.mean_tg = with_tg ? tg / static_cast<double>(with_tg) : kNaN;
      c.mean_tb = with_tg ? tb / static_cast<double>(with_tg) : kNaN;
      res.summary.push_back(c);
    }
    // Best gamma by p_exact; ties keep the earlier gamma in the sweep.
    const CellSummary* best = nullptr;
    for (const CellSummary& c : res.summary) {
      if (c.n != n || c.method.rfind("weighted_l1@", 0) != 0) continue;
      if (!best || c.p_exact > best->p_exact) best = &c;
    }
    if (best) {
      CellSummary b = *best;
      b.method = "weighted_l1";
      res.summary.push_back(b);
    }
  }

  if (cfg.find_n_exact) {
    std::optional<NExactRow> weighted;
    for (const Variant& v : vars) {
      NExactRow row = find_n_exact(cfg, v, opts);
      if (v.method.kind == Method::Kind::WeightedL1) {
        const bool better = row.n && (!weighted || !weighted->n || *row.n < *weighted->n);
        if (!weighted || better) {
          weighted = row;
          weighted->method = "weighted_l1";
        }
      }
      res.n_exact.push_back(std::move(row));
    }
    if (weighted) res.n_exact.push_back(*weighted);
  }
  return res;
}

void write_results_csv(std::ostream& out, const ExperimentResult& r) {
  out << "method,n,trial,exact,rel_err,Ta,Tg,Tb,gamma\n";
  for (const TrialRecord& t : r.records) {
    out << t.method << ',' << t.n << ',' << t.trial << ',' << (t.exact ? 1 : 0) << ','
        << (t.failed ? std::string("nan") : format_real(t.rel_err)) << ',' << t.ta << ',';
    if (t.tg) out << *t.tg;
    out << ',';
    if (t.tb) out << *t.tb;
    out << ',';
    if (t.gamma > 0.0) out << short_real(t.gamma);
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentResult& r) {
  out << "method,n,p_exact,nrmse_mean,nrmse_agg,mean_Ta,mean_Tg,mean_Tb\n";
  for (const CellSummary& c : r.summary) {
    out << c.method << ',' << c.n << ',' << short_real(c.p_exact) << ',' << short_real(c.nrmse_mean) << ','
        << short_real(c.nrmse_agg) << ',' << short_real(c.mean_ta) << ',' << short_real(c.mean_tg) << ','
        << short_real(c.mean_tb) << '\n';
  }
}

void write_n_exact_csv(std::ostream& out, const ExperimentResult& r) {
  out << "method,n_exact,fraction,gamma,status\n";
  const double m = static_cast<double>(r.config.m);
  for (const NExactRow& row : r.n_exact) {
    out << row.method << ',';
    if (row.n) out << *row.n << ',' << short_real(static_cast<double>(*row.n) / m);
    else out << ',';
    out << ',';
    if (row.gamma > 0.0) out << short_real(row.gamma);
    out << ',' << (!row.n ? "above_grid_max" : row.non_monotone ? "non_monotone" : "ok") << '\n';
  }
}

namespace {

using nlohmann::json;

template <class T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw IoError("config must be a JSON object");
  static const std::vector<std::string> known{"name",   "m",        "support_size", "u",           "n",
                                              "n_fractions", "scenario", "trials", "seed",     "methods",
                                              "gammas", "reuse_matrix", "find_n_exact", "n_grid", "set_stats",
                                              "good_set_budget", "description"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw IoError("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  if (j.contains("name")) c.name = field<std::string>(j, "name");
  if (j.contains("m")) c.m = field<std::size_t>(j, "m");
  if (j.contains("support_size")) c.support_size = field<std::size_t>(j, "support_size");
  if (j.contains("u")) c.u = field<std::size_t>(j, "u");
  if (j.contains("trials")) c.trials = field<std::size_t>(j, "trials");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("reuse_matrix")) c.reuse_matrix = field<bool>(j, "reuse_matrix");
  if (j.contains("find_n_exact")) c.find_n_exact = field<bool>(j, "find_n_exact");
  if (j.contains("set_stats")) c.set_stats = field<bool>(j, "set_stats");
  if (j.contains("good_set_budget")) c.good_set_budget = field<std::size_t>(j, "good_set_budget");
  if (j.contains("n")) c.n_values = field<std::vector<std::size_t>>(j, "n");
  auto to_n = [&c](double f) {
    if (!(f > 0.0) || f > 1.0) throw DomainError("config: n fractions must lie in (0, 1]");
    return static_cast<std::size_t>(std::llround(f * static_cast<double>(c.m)));
  };
  if (j.contains("n_fractions")) {
    for (double f : field<std::vector<double>>(j, "n_fractions")) c.n_values.push_back(to_n(f));
  }
  if (j.contains("n_grid")) c.n_grid = field<std::vector<std::size_t>>(j, "n_grid");
  if (j.contains("gammas")) c.gammas = field<std::vector<double>>(j, "gammas");
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& name : field<std::vector<std::string>>(j, "methods")) {
      try {
        c.methods.push_back(Method::parse(name).kind);
      } catch (const DomainError& e) {
        throw IoError(std::string("config: ") + e.what());
      }
    }
  }
  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    if (!s.is_object()) throw IoError("config field 'scenario' must be an object");
    const std::string kind = field<std::string>(s, "kind");
    if (kind == "quantized") {
      c.scenario = Scenario::quantized(s.contains("K") ? field<std::size_t>(s, "K") : 2,
                                       s.contains("rho") ? field<double>(s, "rho") : 0.1);
    } else if (kind == "three_bit") {
      c.scenario = Scenario::three_bit();
    } else if (kind == "continuous") {
      c.scenario = Scenario::continuous(s.contains("rho") ? field<double>(s, "rho") : 0.1);
    } else {
      throw IoError("config: unknown scenario kind '" + kind + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace regbp
