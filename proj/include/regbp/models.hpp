#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regbp/index_set.hpp"
#include "regbp/linalg.hpp"
#include "regbp/lp.hpp"

namespace regbp {

/// Measurements y = A x of an m-length signal, with the true signal kept when
/// known so recoveries can be scored.
struct RecoveryInstance {
  DenseMatrix a;
  Vector y;
  std::optional<Vector> x_true;
  IndexSet support;  // nonzeros of x_true; empty when x_true is absent

  /// y := A x, support := {i : x_i != 0}.
  static RecoveryInstance from_signal(DenseMatrix a, Vector x);
  /// Throws DomainError when y != A x_true beyond 1e-12 (scaled).
  static RecoveryInstance from_measurements(DenseMatrix a, Vector y, std::optional<Vector> x_true = {});

  std::size_t n() const { return a.rows(); }
  std::size_t m() const { return a.cols(); }
};

/// Support estimate T, signal estimate on T, and the max-norm radius rho.
class PriorKnowledge {
 public:
  /// Checks T subset of [0, m) and |mu_hat_t| = |T|; rho may be +inf.
  PriorKnowledge(IndexSet t, Vector mu_hat_t, double rho, std::size_t m);
  /// As above, and additionally rejects priors with ||x_T - mu_T||_inf > rho
  /// for the instance's true signal.
  static PriorKnowledge for_instance(const RecoveryInstance& inst, IndexSet t, Vector mu_hat_t, double rho);

  const IndexSet& t() const { return t_; }
  const Vector& mu_hat_t() const { return mu_; }
  double rho() const { return rho_; }
  std::size_t k() const { return t_.size(); }
  std::size_t m() const { return m_; }

  /// Full-length estimate, zero off T.
  Vector mu_hat_full() const;
  IndexSet misses(const IndexSet& support) const { return set_difference(support, t_); }
  IndexSet extras(const IndexSet& support) const { return set_difference(t_, support); }

  /// Largest |x_i - mu_i| over T.
  double max_deviation(std::span<const double> x) const;
  /// Tolerance used when comparing deviations against rho.
  double rho_tolerance() const;
  /// Throws DomainError when the true signal lies outside the box.
  void require_feasible(std::span<const double> x) const;

 private:
  IndexSet t_;
  Vector mu_;
  double rho_;
  std::size_t m_;
};

struct Method {
  enum class Kind { BP, ModCS, WeightedL1, RegModBP };
  Kind kind = Kind::BP;
  double gamma = 1.0;  // WeightedL1 only

  static Method bp() { return {Kind::BP, 1.0}; }
  static Method modcs() { return {Kind::ModCS, 1.0}; }
  static Method weighted_l1(double gamma);
  static Method regmodbp() { return {Kind::RegModBP, 1.0}; }

  /// "bp", "modcs", "weighted_l1", "regmodbp".
  std::string name() const;
  /// Accepts the names above (and "weighted" as an alias).
  static Method parse(const std::string& name, double gamma = 0.1);
};

/// The weighted-l1 sweep used by the experiments.
inline const std::vector<double> kDefaultGammaSweep{0.1, 0.05, 0.01, 0.001};

/// An LP plus the map from its variables back to beta.
///
/// Coordinates carrying an l1 cost are split as beta_i = p_i - q_i with
/// p_i, q_i >= 0 and cost w_i on both halves. Coordinates with zero l1 cost
/// stay a single variable whose bounds carry any box constraint. Variables are
/// laid out in coordinate order.
struct ReducedLP {
  StandardLP lp;
  std::vector<std::size_t> pos;  // variable holding beta_i (or p_i)
  std::vector<std::size_t> neg;  // q_i, or npos when beta_i is not split

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  Vector extract(std::span<const double> solution) const;
};

ReducedLP reduce_bp(const RecoveryInstance& inst);
ReducedLP reduce_modcs(const RecoveryInstance& inst, const PriorKnowledge& prior);
ReducedLP reduce_weighted_l1(const RecoveryInstance& inst, const PriorKnowledge& prior, double gamma);
/// Throws DomainError when the instance's true signal violates the prior box.
ReducedLP reduce_regmodbp(const RecoveryInstance& inst, const PriorKnowledge& prior);
ReducedLP reduce(const RecoveryInstance& inst, const PriorKnowledge* prior, const Method& method);

/// Solves the method's LP and returns its minimizer. BP ignores the prior.
Vector recover(const RecoveryInstance& inst, const PriorKnowledge* prior, const Method& method,
               const SimplexOptions& opts = {});

std::vector<int> sign_pattern(std::span<const double> b);
Vector clip_0_7(std::span<const double> b);

/// ||xhat - x||_2 / ||x||_2; throws DomainError for a zero x.
double relative_error(std::span<const double> xhat, std::span<const double> x);
/// relative_error < 1e-5.
bool is_exact(std::span<const double> xhat, std::span<const double> x);

inline constexpr double kExactThreshold = 1e-5;

}  // namespace regbp
