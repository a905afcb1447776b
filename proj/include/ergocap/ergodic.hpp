#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergocap/invariance.hpp"

namespace ergocap {

enum class SeqKind { AdditiveFromF, AbsOfAdditive, NegAbsOfAdditive };
enum class SeqMode { Additive, Subadditive, Superadditive };

/// A generator-defined orbit-sum sequence:
///   additive      S_n = sum_{k=1}^{n} f(tau^{k-1} .)
///   abs           |S_n|            (a genuine subadditive sequence)
///   negated abs   -|S_n|           (superadditive)
/// All three satisfy the linear growth bound with lambda = max |f|.
class SuperadditiveSequence {
 public:
  SuperadditiveSequence(SeqKind kind, FiniteMap tau, RealFunction f);

  SeqKind kind() const { return kind_; }
  SeqMode declared_mode() const;
  const FiniteMap& map() const { return tau_; }
  const RealFunction& base_function() const { return f_; }
  const Rat& lambda() const { return lambda_; }

  /// S_n at a point (n >= 1).
  Rat eval(int n, int point) const;
  /// The whole row S_n as a function.
  RealFunction row(int n) const;

  struct ModeViolation {
    int n, k, point;
  };
  /// Checks S_{n+k} >=/<=/= S_n + S_k(tau^n .) for all n + k <= n_check.
  /// (The additive kind is checked with equality.)
  std::optional<ModeViolation> verify_mode(int n_check) const;

  struct GrowthViolation {
    int n, point;
  };
  /// Checks -lambda n <= S_n <= lambda n for all n <= n_check.
  std::optional<GrowthViolation> verify_growth(int n_check) const;

  /// Closed-form limit of S_n/n: the reachable-cycle mean of f, with the
  /// kind's absolute value or negation applied.
  RealFunction limit() const;

 private:
  const std::vector<Rat>& additive_row(int n) const;
  SeqKind kind_;
  FiniteMap tau_;
  RealFunction f_;
  Rat lambda_;
  mutable std::vector<std::vector<Rat>> additive_rows_;  // [n-1] -> per-point S_n
};

/// A verified statement of the form "the event carries capacity one".
struct BoundEventCertificate {
  std::uint32_t event_mask = 0;
  Rat lower;
  Rat upper;
  Rat nu_of_event;
  bool pass = false;
};

/// One verified theorem clause.
struct ClauseResult {
  std::string clause;       // stable id, e.g. "ET.bounds"
  bool applicable = false;  // hypotheses of this clause hold
  bool holds = false;       // conclusion verified (when applicable)
  bool exact = true;        // exact rational check vs tolerance check
  std::string detail;
};

/// Certificate for the ergodic theorem under plain invariance: time averages
/// of f converge to a lattice-measurable limit on an event of capacity one,
/// and under ergodicity the limit is bracketed by the Choquet integrals
/// of the limit function.
struct ErgodicCertificate {
  RealFunction fstar;
  Rat nu_of_convergence_event;  // capacity of the whole space
  bool ergodic = false;
  std::optional<BoundEventCertificate> bounds;
  std::vector<ClauseResult> clauses;
  bool all_conclusions_hold = false;
};

/// Requires nu invariant and a lower probability; refuses otherwise with
/// HypothesisFailure. The presentation, when given, certifies the
/// lower-probability hypothesis without enumerating the core.
ErgodicCertificate verify_pointwise_ergodic(const Capacity& nu, const FiniteMap& tau,
                                            const RealFunction& f,
                                            const std::optional<CredalSet>& presentation = {},
                                            const CoreOptions& opts = {});

/// Certificate for the {0,1}-lattice bracketing lemma, including the
/// threshold construction it rests on.
struct LatticeLemmaCertificate {
  Rat shift;          // c with g + c >= 0
  Rat t_star;         // sup of the full-capacity upper-level thresholds of g+c
  Rat t_star_lower;   // sup of the dual threshold set (<= 0)
  Rat lower;          // choquet(nu, g)
  Rat upper;          // choquet_upper(nu, g)
  bool threshold_identity = false;  // t_star equals choquet(nu, g+c)
  BoundEventCertificate bounds;
};

/// Requires: nu a lower probability, nu in {0,1} on the sub-lattice spanned
/// by the given partition blocks, g constant on each block.
LatticeLemmaCertificate verify_lattice_lemma(const Capacity& nu, const RealFunction& g,
                                             const std::vector<std::uint32_t>& blocks,
                                             const std::optional<CredalSet>& presentation = {},
                                             const CoreOptions& opts = {});

/// Certificate for the convex strongly-invariant case: the limit function is
/// a conditional expectation for every invariant measure, its Choquet
/// integrals agree with those of f, and under ergodicity the bound event
/// uses the integrals of f itself.
struct BirkhoffEnvelopeCertificate {
  RealFunction fstar;
  bool conditional_expectation_identity = false;
  Rat int_f_lower, int_fstar_lower;
  Rat int_f_upper, int_fstar_upper;
  bool integral_identity = false;
  bool ergodic = false;
  std::optional<BoundEventCertificate> bounds;
  std::vector<ClauseResult> clauses;
  bool all_conclusions_hold = false;
};

/// Requires nu convex and strongly invariant.
BirkhoffEnvelopeCertificate verify_birkhoff_envelope(const Capacity& nu, const FiniteMap& tau,
                                                     const RealFunction& f);

/// Certificate for the super/subadditive ergodic statement.
struct KingmanCertificate {
  RealFunction fstar;
  std::vector<ClauseResult> clauses;
  std::optional<Rat> sup_of_lower_integrals;  // best over n <= horizon
  long sup_attained_at = 0;
  std::optional<Rat> inf_of_upper_integrals;
  long inf_attained_at = 0;
  std::optional<BoundEventCertificate> bounds;
  int n_check = 0;
  long horizon = 0;
  Rat tol;
  bool all_conclusions_hold = false;
};

/// Requires: mode and growth verified up to n_check (violations raise
/// HypothesisFailure with the witness), and nu functionally invariant via
/// the supplied presentation. The sup/inf clauses additionally require nu
/// convex and strongly invariant; the bound-event clause requires
/// ergodicity. Clauses with unmet hypotheses are reported, not verified.
KingmanCertificate verify_kingman(const Capacity& nu, const FiniteMap& tau,
                                  const SuperadditiveSequence& s,
                                  const CredalSet& presentation, long horizon,
                                  const Rat& tol, int n_check = 64,
                                  const CoreOptions& opts = {});

/// Fekete estimate for a subadditive real sequence prefix.
struct FeketeResult {
  Rat estimate;  // a_N / N
  Rat gap;       // a_N/N - min over the whole prefix of a_n/n (>= 0 when subadditive)
  std::optional<std::pair<long, long>> violation;  // (n, k) with a_{n+k} > a_n + a_k
  long verified_pair_cap = 0;  // all pairs with n + k <= this were checked
};

/// a holds a_1..a_L; N defaults to L. Subadditivity is verified exhaustively
/// for all n + k <= min(L, check_cap) and the first violation is reported.
FeketeResult fekete_limit(const std::vector<Rat>& a, long N = -1, long check_cap = 2048);

}  // namespace ergocap
