#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "regbp/index_set.hpp"
#include "regbp/linalg.hpp"
#include "regbp/models.hpp"
#include "regbp/rng.hpp"

namespace regbp {

struct Scenario {
  enum class Kind { Quantized, ThreeBit, Continuous };
  Kind kind = Kind::Quantized;
  std::size_t levels = 2;  // K, quantized grid only
  double rho = 0.1;        // fixed at 2 for ThreeBit

  static Scenario quantized(std::size_t k, double rho) { return {Kind::Quantized, k, rho}; }
  static Scenario three_bit() { return {Kind::ThreeBit, 0, 2.0}; }
  static Scenario continuous(double rho) { return {Kind::Continuous, 0, rho}; }
  /// "quantized", "three_bit", "continuous".
  std::string name() const;
  /// True when box constraints can be active with nonzero probability.
  bool can_activate() const { return kind != Kind::Continuous; }
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::size_t m = 256;
  std::size_t support_size = 26;
  std::size_t u = 3;
  std::vector<std::size_t> n_values;  // measurement counts for the p_exact cells
  Scenario scenario;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::vector<Method::Kind> methods{Method::Kind::BP, Method::Kind::ModCS, Method::Kind::WeightedL1,
                                    Method::Kind::RegModBP};
  std::vector<double> gammas = kDefaultGammaSweep;
  /// Draw every n's matrix as the leading rows of one shared matrix instead of
  /// a fresh matrix per n.
  bool reuse_matrix = false;
  /// Run the n_exact(1) scan.
  bool find_n_exact = false;
  /// Ascending grid for the scan; empty means default_n_grid(m).
  std::vector<std::size_t> n_grid;
  /// Compute |T_g|, |T_b| (needs a good-set search per trial and n).
  bool set_stats = true;
  std::size_t good_set_budget = 20;

  /// Throws DomainError unless |N| + u <= m, u <= |N|, trials >= 1,
  /// 1 <= n <= m and gammas > 0.
  void validate() const;
  std::vector<std::size_t> grid() const;
};

/// Multiples of ceil(0.01 m) between 0.05 m and 0.5 m.
std::vector<std::size_t> default_n_grid(std::size_t m);

/// i.i.d. standard normal entries filled row by row, then each column scaled
/// to unit norm.
DenseMatrix gen_gaussian_matrix(std::size_t n, std::size_t m, Rng& rng);

struct SupportDraw {
  IndexSet n;        // true support
  IndexSet delta;    // misses, subset of n
  IndexSet extras;   // subset of the complement of n
  IndexSet t;        // (n \ delta) + extras
};

/// N uniform of size sizeN; delta uniform of size u inside N; extras uniform
/// of size u outside N.
SupportDraw gen_support(std::size_t m, std::size_t size_n, std::size_t u, Rng& rng);

struct SignalDraw {
  Vector x;
  Vector mu_hat_t;  // aligned with t
  double rho = 0.0;
};

/// x = +-1 on N cap T and +-0.1 on delta. Estimate noise on T is a multiple
/// of rho/K in [-rho, rho] (nonzero on the extras).
SignalDraw gen_signal_quantized(const SupportDraw& s, std::size_t m, std::size_t levels, double rho, Rng& rng);
/// x in {3..7} on N cap T and {1, 2} on delta; mu_hat = clip(x + nu) with nu
/// in {-2..2} ({-2,-1,1,2} on the extras); rho = 2.
SignalDraw gen_signal_3bit(const SupportDraw& s, std::size_t m, Rng& rng);
/// Magnitudes as the quantized case; nu uniform on [-rho, rho).
SignalDraw gen_signal_continuous(const SupportDraw& s, std::size_t m, double rho, Rng& rng);
SignalDraw gen_signal(const Scenario& sc, const SupportDraw& s, std::size_t m, Rng& rng);

/// One method variant: kind plus gamma for weighted-l1.
struct Variant {
  Method method;
  std::string label() const;  // "bp", "weighted_l1@0.1", ...
};

struct TrialRecord {
  std::string method;  // Variant label
  double gamma = 0.0;  // 0 for methods without a weight
  std::size_t n = 0;
  std::size_t trial = 0;
  bool exact = false;
  bool failed = false;  // LP error; rel_err is NaN
  double rel_err = 0.0;
  double err_sq = 0.0;
  double x_sq = 0.0;
  std::size_t ta = 0;
  std::optional<std::size_t> tg;
  std::optional<std::size_t> tb;
};

struct CellSummary {
  std::string method;  // Variant label, or "weighted_l1" for the best-gamma row
  double gamma = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t exact = 0;
  std::size_t failed = 0;
  double p_exact = 0.0;
  double nrmse_mean = 0.0;  // mean of per-trial relative errors
  double nrmse_agg = 0.0;   // sqrt(sum ||e||^2 / sum ||x||^2)
  double mean_ta = 0.0;
  double mean_tg = 0.0;  // NaN when not computed
  double mean_tb = 0.0;
};

struct NExactRow {
  std::string method;
  std::optional<std::size_t> n;  // empty: above grid max
  double gamma = 0.0;            // weighted-l1: the gamma achieving it
  bool non_monotone = false;     // a larger grid point failed afterwards
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  std::vector<CellSummary> summary;
  std::vector<NExactRow> n_exact;
};

struct RunOptions {
  std::size_t workers = 1;
};

/// Runs every (method variant, n, trial) cell, then the n_exact scan when
/// configured. Output depends only on the config, never on `workers`.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Smallest grid n where every trial is exact for the variant.
NExactRow find_n_exact(const ExperimentConfig& cfg, const Variant& v, const RunOptions& opts = {});

/// Matrix used for measurement count n.
DenseMatrix experiment_matrix(const ExperimentConfig& cfg, std::size_t n);

/// Everything one trial draws.
struct TrialData {
  SupportDraw sets;
  SignalDraw signal;
};
TrialData draw_trial(const ExperimentConfig& cfg, std::size_t trial);

void write_results_csv(std::ostream& out, const ExperimentResult& r);
void write_summary_csv(std::ostream& out, const ExperimentResult& r);
void write_n_exact_csv(std::ostream& out, const ExperimentResult& r);

/// JSON config: {"name", "m", "support_size", "u", "n": [..] or
/// "n_fractions": [..], "scenario": {"kind", "K", "rho"}, "trials", "seed",
/// "methods": [..], "gammas": [..], "reuse_matrix", "find_n_exact",
/// "n_grid", "set_stats", "good_set_budget"}. Missing fields keep defaults.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig read_experiment_config(const std::string& path);

}  // namespace regbp
