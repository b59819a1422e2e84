#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regbp/index_set.hpp"
#include "regbp/linalg.hpp"
#include "regbp/models.hpp"
#include "regbp/rip.hpp"

namespace regbp {

/// Split of T by which side of the box the true signal touches.
struct ActivePartition {
  IndexSet plus;   // x_i - mu_i = +rho
  IndexSet minus;  // x_i - mu_i = -rho
  IndexSet inner;  // strictly inside the box

  IndexSet active() const { return set_union(plus, minus); }
  IndexSet t() const { return set_union(active(), inner); }
};

/// Active-set membership uses |x_i - mu_i -/+ rho| <= tol; tol defaults to
/// 1e-9 * max(1, rho). Throws DomainError "rho below tolerance" when an index
/// matches both sides.
ActivePartition classify_active(std::span<const double> x, const PriorKnowledge& prior,
                                std::optional<double> tol = std::nullopt);

/// Strict sign margin applied to the good-set witness.
inline constexpr double kGoodSetMargin = 1e-10;

struct GoodSetResult {
  IndexSet plus_good;
  IndexSet minus_good;
  IndexSet bad;  // T minus the good sets
  std::size_t k_b = 0;
  Vector w;       // witness built on `bad`
  bool searched = true;  // false when the active set exceeded the budget
};

/// w = M(T_b) A_delta (A_delta' M(T_b) A_delta)^{-1} sgn, where M(S) is the
/// projector onto the orthogonal complement of range(A_S). Throws DomainError
/// when A restricted to T_b and delta is not of full column rank.
Vector lemma2_w(const DenseMatrix& a, const IndexSet& t_b, const IndexSet& delta, std::span<const int> sgn_delta);

struct WitnessResult {
  Vector w;
  IndexSet exceptional;  // E, disjoint with T and delta
  double a_value = 0.0;  // a_{k_b}(u, sc)
  double k_value = 0.0;  // K_{k_b}(u)
  double column_bound = 0.0;  // a_{k_b}(u, sc) sqrt(u) / sqrt(sc)
};

/// Witness with the exceptional set relative to T and delta. Requires
/// delta_u + delta_{k_b} + theta_{k_b,u}^2 < 1 from the table (DomainError
/// otherwise) and sc >= 1.
WitnessResult good_set_witness(const DenseMatrix& a, const IndexSet& t, const IndexSet& t_b, const IndexSet& delta,
                    std::span<const int> sgn_delta, const RipTable& table, std::size_t sc);

struct GoodSetOptions {
  /// Searches are skipped (searched = false) above this many active indices.
  std::size_t max_active = 22;
  std::size_t workers = 1;
};

/// Largest subsets of the active sets whose witness has A_i'w > margin on the
/// plus side and < -margin on the minus side. Candidates are tried by
/// decreasing size, and within a size in lexicographic order of the merged
/// index list; the first that passes wins.
///
/// Each candidate is evaluated in Gram space over T and delta, so it needs
/// that Gram to be positive definite (DomainError otherwise).
GoodSetResult good_set_search(const DenseMatrix& a, const ActivePartition& part, const IndexSet& delta,
                              std::span<const int> sgn_delta, const GoodSetOptions& opts = {});

struct InterpolationResult {
  Vector w;
  IndexSet exceptional;
  double a_value = 0.0;       // a_k(s, sc), NaN when undefined
  double threshold = 0.0;     // a_k(s, sc) ||c|| / sqrt(sc)
  bool hypothesis = false;    // delta_s + delta_k + theta_{k,s}^2 < 1
};

/// w = M(T) A_{T_d} (A_{T_d}' M(T) A_{T_d})^{-1} c with
/// E = { j outside T and T_d : |A_j'w| > a_k(s, sc) ||c||_2 / sqrt(sc) }.
/// s defaults to |T_d|. Throws DomainError when the hypothesis fails, unless
/// `force`, in which case an undefined a_k leaves E empty.
InterpolationResult lemma3_w(const DenseMatrix& a, const IndexSet& t, const IndexSet& t_d, std::span<const double> c,
                      const RipTable& table, std::size_t sc, std::optional<std::size_t> s = std::nullopt,
                      bool force = false);

struct CertificateCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct CertificateReport {
  Vector w;
  std::size_t terms = 0;
  std::vector<double> residuals;  // ||A_{T_{d,r}}' w_r||_2 per term
  std::vector<double> term_norms;  // ||w_r||_2 per term
  double ratio_bound = 0.0;        // a_k(2u, u)
  bool ratio_ok = true;
  bool converged = true;
  bool forced = false;
  std::vector<CertificateCheck> checks;
  bool pass = false;
};

struct CertificateOptions {
  std::size_t max_iters = 200;
  double tol_series = 1e-12;
  bool force = false;
};

/// Tolerance of the certificate checks.
inline constexpr double kCertificateTol = 1e-8;

/// Checks
///   |A_i'w| <= tol on the inner set, A_i'w >= -tol on plus, <= tol on minus;
///   |A_delta'w - sgn| <= tol;
///   max |A_j'w| over j outside T and delta < 1 - tol;
///   delta_{k+u} < 1 (from `delta_ku` when given, else full column rank of
///   A over T and delta).
CertificateReport verify_lemma1(const DenseMatrix& a, std::span<const double> w, const ActivePartition& part,
                                const IndexSet& delta, std::span<const int> sgn_delta,
                                std::optional<double> delta_ku = std::nullopt);

/// Alternating series w = w_1 - w_2 + ... with w_1 from good_set_witness (sc = u) and
/// later terms from the interpolation step on T_d = delta + previous exceptional set, then
/// verify_lemma1 on the sum. Refuses (DomainError) when the recovery conditions
/// fail unless `force`.
CertificateReport build_certificate(const DenseMatrix& a, const ActivePartition& part, const GoodSetResult& good,
                                    const IndexSet& delta, std::span<const int> sgn_delta, const RipTable& table,
                                    const CertificateOptions& opts = {});

/// Everything `certify` reports for one instance.
struct Certification {
  ActivePartition partition;
  IndexSet delta;
  IndexSet extras;
  GoodSetResult good;
  ConditionReport conditions;
  std::optional<CertificateReport> certificate;
  /// "certified" when the conditions and certificate checks pass, else "inconclusive".
  std::string verdict;
};

/// Full pipeline for an instance with a known signal and cols <= the RIP cap.
Certification certify(const RecoveryInstance& inst, const PriorKnowledge& prior, bool force = false,
                      std::size_t workers = 1);

}  // namespace regbp
