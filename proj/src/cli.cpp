#include "regbp/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include "CLI11.hpp"

#include "regbp/bench.hpp"
#include "regbp/certificates.hpp"
#include "regbp/csv.hpp"
#include "regbp/io.hpp"
#include "regbp/models.hpp"
#include "regbp/rip.hpp"

namespace regbp {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write '" + p.string() + "'");
  return f;
}

struct SolveArgs {
  std::string instance;
  std::string method = "regmodbp";
  std::vector<double> gamma;
  std::optional<double> rho;
  std::string out;
  std::string dump_lp;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  InstanceFile f = read_instance(a.instance);
  const Method method = Method::parse(a.method, a.gamma.empty() ? 0.1 : a.gamma.front());
  if (a.rho) {
    if (!f.prior) throw DomainError("--rho needs an instance with T");
    f.prior.emplace(f.prior->t(), f.prior->mu_hat_t(), *a.rho, f.instance.m());
    if (f.instance.x_true) f.prior->require_feasible(*f.instance.x_true);
  }
  const PriorKnowledge* prior = f.prior ? &*f.prior : nullptr;
  if (!a.dump_lp.empty()) {
    std::ofstream d = open_out(a.dump_lp);
    dump_lp(d, reduce(f.instance, prior, method).lp);
  }
  const Vector xhat = recover(f.instance, prior, method);
  if (a.out.empty()) {
    write_vector_csv(out, xhat);
  } else {
    write_vector_csv(fs::path(a.out), xhat);
  }
  err << method.name() << ": solved " << f.instance.n() << "x" << f.instance.m() << " instance";
  if (f.instance.x_true) {
    const double rel = relative_error(xhat, *f.instance.x_true);
    err << ", relative error " << rel << (rel < kExactThreshold ? " (exact)" : " (not exact)");
  }
  err << '\n';
  return 0;
}

struct RipArgs {
  std::string matrix;
  std::size_t smax = 2;
  std::string out;
  std::size_t workers = 1;
};

int cmd_rip(const RipArgs& a, std::ostream& out, std::ostream&) {
  const DenseMatrix m = read_matrix_csv(a.matrix);
  const RipTable t = RipTable::compute(m, a.smax, a.workers);
  if (a.out.empty()) {
    write_rip_csv(out, t);
  } else {
    std::ofstream f = open_out(a.out);
    write_rip_csv(f, t);
  }
  return 0;
}

struct CertifyArgs {
  std::string instance;
  std::string out;
  std::optional<double> rho;
  bool force = false;
  std::size_t workers = 1;
};

int cmd_certify(const CertifyArgs& a, std::ostream& out, std::ostream&) {
  InstanceFile f = read_instance(a.instance);
  if (!f.prior) throw DomainError("certify needs an instance with T, mu_hat and rho");
  if (a.rho) f.prior.emplace(f.prior->t(), f.prior->mu_hat_t(), *a.rho, f.instance.m());
  const Certification c = certify(f.instance, *f.prior, a.force, a.workers);
  print_certification(out, c);
  if (!a.out.empty()) {
    std::ofstream j = open_out(a.out);
    j << certification_json(c) << '\n';
  }
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::vector<double> gamma;
  std::optional<double> rho;
  std::string out = "experiment_out";
  std::size_t workers = 1;
  bool skip_n_exact = false;
  bool reuse_matrix = false;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = read_experiment_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.trials) cfg.trials = *a.trials;
  if (!a.gamma.empty()) cfg.gammas = a.gamma;
  if (a.rho) {
    if (cfg.scenario.kind == Scenario::Kind::ThreeBit) throw DomainError("the three_bit scenario fixes rho = 2");
    cfg.scenario.rho = *a.rho;
  }
  if (a.skip_n_exact) cfg.find_n_exact = false;
  if (a.reuse_matrix) cfg.reuse_matrix = true;
  cfg.validate();

  RunOptions opts;
  opts.workers = a.workers;
  const ExperimentResult r = run_experiment(cfg, opts);

  const fs::path dir(a.out);
  {
    std::ofstream f = open_out(dir / "results.csv");
    write_results_csv(f, r);
  }
  {
    std::ofstream f = open_out(dir / "summary.csv");
    write_summary_csv(f, r);
  }
  if (cfg.find_n_exact) {
    std::ofstream f = open_out(dir / "n_exact.csv");
    write_n_exact_csv(f, r);
  }

  out << cfg.name << " (" << cfg.scenario.name() << ", m=" << cfg.m << ", trials=" << cfg.trials
      << ", seed=" << cfg.seed << ")\n";
  out << std::left << std::setw(18) << "method" << std::setw(6) << "n" << std::setw(10) << "p_exact"
      << std::setw(12) << "nrmse" << std::setw(8) << "|T_a|" << std::setw(8) << "|T_g|" << "|T_b|\n";
  for (const CellSummary& c : r.summary) {
    out << std::setw(18) << c.method << std::setw(6) << c.n << std::setw(10) << c.p_exact << std::setw(12)
        << c.nrmse_mean << std::setw(8) << c.mean_ta << std::setw(8) << c.mean_tg << c.mean_tb << '\n';
  }
  for (const NExactRow& row : r.n_exact) {
    out << "n_exact(1) " << row.method << ": ";
    if (row.n) {
      out << *row.n << " (" << static_cast<double>(*row.n) / static_cast<double>(cfg.m) << "m)";
      if (row.non_monotone) out << ", a larger grid point failed";
    } else {
      out << "above grid max";
    }
    out << '\n';
  }
  std::size_t failed = 0;
  for (const CellSummary& c : r.summary)
    if (c.method != "weighted_l1") failed += c.failed;
  if (failed) err << "warning: " << failed << " trial solve(s) failed; see results.csv (rel_err = nan)\n";
  return 0;
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse recovery with a box-constrained signal estimate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "regbp 1.0");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Recover one instance and write the estimate as CSV");
  solve->add_option("--instance", sa.instance, "Instance JSON")->required();
  solve->add_option("--method", sa.method, "bp | modcs | weighted_l1 | regmodbp")->capture_default_str();
  solve->add_option("--gamma", sa.gamma, "weighted-l1 weight (first value is used)")->delimiter(',');
  solve->add_option("--rho", sa.rho, "Override the instance's box radius");
  solve->add_option("--out", sa.out, "Output CSV (default: stdout)");
  solve->add_option("--dump-lp", sa.dump_lp, "Also write the reduced LP in text form");

  RipArgs ra;
  ra.workers = default_workers();
  auto* rip = app.add_subcommand("rip", "Exact RIC/ROC table as CSV rows kind,s1,s2,value");
  rip->add_option("--matrix", ra.matrix, "Matrix CSV")->required();
  rip->add_option("--smax", ra.smax, "Largest order")->capture_default_str();
  rip->add_option("--out", ra.out, "Output CSV (default: stdout)");
  rip->add_option("--workers", ra.workers, "Worker threads")->check(CLI::PositiveNumber);

  CertifyArgs ca;
  ca.workers = default_workers();
  auto* cert = app.add_subcommand("certify", "Check the exact-recovery conditions and build a dual certificate");
  cert->add_option("--instance", ca.instance, "Instance JSON with x_true, T, mu_hat, rho")->required();
  cert->add_option("--out", ca.out, "Write the JSON report here");
  cert->add_option("--rho", ca.rho, "Override the instance's box radius");
  cert->add_flag("--force", ca.force, "Build the certificate even when the conditions fail");
  cert->add_option("--workers", ca.workers, "Worker threads")->check(CLI::PositiveNumber);

  ExperimentArgs ea;
  ea.workers = default_workers();
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON config");
  exp->add_option("--config", ea.config, "Experiment config JSON")->required();
  exp->add_option("--seed", ea.seed, "Override the config seed");
  exp->add_option("--trials", ea.trials, "Override the trial count")->check(CLI::PositiveNumber);
  exp->add_option("--gamma", ea.gamma, "weighted-l1 sweep override, comma separated")->delimiter(',');
  exp->add_option("--rho", ea.rho, "Override the scenario's box radius");
  exp->add_option("--out", ea.out, "Output directory")->capture_default_str();
  exp->add_option("--workers", ea.workers, "Worker threads")->check(CLI::PositiveNumber);
  exp->add_flag("--skip-n-exact", ea.skip_n_exact, "Skip the n_exact(1) scan");
  exp->add_flag("--reuse-matrix", ea.reuse_matrix, "Use leading rows of one matrix for every n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(sa, out, err);
    if (rip->parsed()) return cmd_rip(ra, out, err);
    if (cert->parsed()) return cmd_certify(ca, out, err);
    if (exp->parsed()) return cmd_experiment(ea, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace regbp
