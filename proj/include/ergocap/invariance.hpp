#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergocap/dynamics.hpp"

namespace ergocap {

/// Yes/no verdict with an event witness on failure.
struct EventVerdict {
  bool yes = true;
  std::optional<std::uint32_t> witness_event;
};

/// Yes/no verdict with the index of an offending credal member on failure.
struct MemberVerdict {
  bool yes = true;
  std::optional<std::size_t> witness_member;
};

/// nu(A) = nu(tau^{-1}(A)) for every event A.
EventVerdict is_invariant(const Capacity& nu, const FiniteMap& tau);

/// Both displayed equalities of the strong form:
///   nu(A \ tau^{-1}A) = conj(nu)(tau^{-1}A \ A) and symmetrically.
EventVerdict is_strongly_invariant(const Capacity& nu, const FiniteMap& tau);

/// Every member of the presentation is an invariant measure.
MemberVerdict is_functionally_invariant(const CredalSet& m, const FiniteMap& tau);

/// Every value of nu on the invariant lattice is exactly 0 or 1.
EventVerdict is_ergodic(const Capacity& nu, const FiniteMap& tau);

/// The robust construction from a set of ergodic invariant measures:
/// the prior is the {0,1} capacity assigning 1 exactly to families containing
/// M inside the full ergodic family S(I); its predictive is returned and
/// verified to equal lower_envelope(M) and to be ergodic.
struct RobustConstruction {
  Prior prior;                  // on the family space over S(I)
  CredalSet ergodic_family;     // S(I) of tau
  std::vector<std::size_t> m_indices;  // positions of M inside S(I)
  Capacity predictive_capacity; // equals lower_envelope(M)
};

RobustConstruction robust_invariant_from(const CredalSet& m, const FiniteMap& tau);

/// Checks a supplied prior candidate: rho must be convex and its predictive
/// over the family must reproduce nu eventwise. Deciding whether *some*
/// convex prior represents nu is out of scope; this and the sufficient
/// construction above are the two supported routes.
bool is_robustly_invariant_via(const Prior& rho, const CredalSet& family,
                               const Capacity& nu);

/// Aggregate report over the invariance notions for one instance.
struct InvarianceReport {
  EventVerdict invariant;
  EventVerdict strongly_invariant;
  std::optional<MemberVerdict> functionally_invariant;  // when a presentation is given
  bool robust_certificate = false;  // sufficient construction succeeded
  EventVerdict ergodic;
};

InvarianceReport invariance_report(const Capacity& nu, const FiniteMap& tau,
                                   const std::optional<CredalSet>& presentation);

/// One audited implication.
struct AuditRecord {
  std::string implication;  // stable id, e.g. "strong-implies-core-invariant"
  enum class Verdict { Pass, Violated, NotApplicable } verdict = Verdict::NotApplicable;
  std::string witness;  // empty unless violated
};

struct AuditInstance {
  std::string id;
  Capacity nu;
  FiniteMap tau;
  std::optional<CredalSet> presentation;
};

struct AuditReport {
  std::string instance_id;
  std::vector<AuditRecord> records;
  bool any_violation = false;
  /// Side measurement: convexity of the predictive of a convex prior, when
  /// the instance carries a presentation inside S(I). Not an assertion.
  std::optional<bool> predictive_convexity_sample;
};

/// Cross-checks the implication structure between the invariance notions on
/// one instance, including the core-based equivalence for convex capacities
/// and the finite checkable forms of the potential-invariance conditions.
AuditReport implication_audit(const AuditInstance& instance,
                              const CoreOptions& opts = {});

}  // namespace ergocap
