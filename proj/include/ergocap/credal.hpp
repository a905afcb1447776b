#pragma once

#include <optional>
#include <vector>

#include "ergocap/capacity.hpp"

namespace ergocap {

/// A probability on a finite space, stored as per-point masses.
class ProbabilityWeights {
 public:
  /// Validates masses >= 0 and sum = 1.
  static ProbabilityWeights from_masses(FiniteSpace space, std::vector<Rat> masses);
  static ProbabilityWeights uniform(FiniteSpace space, std::uint32_t support_mask);
  static ProbabilityWeights dirac(FiniteSpace space, int point);

  const FiniteSpace& space() const { return space_; }
  const std::vector<Rat>& masses() const { return masses_; }
  const Rat& mass(int point) const { return masses_[static_cast<std::size_t>(point)]; }

  /// P(A) as the mass of the event.
  Rat of(std::uint32_t event_mask) const;
  Rat of(const Event& e) const;

  Rat expectation(const RealFunction& f) const;
  Capacity as_capacity() const;

  friend bool operator==(const ProbabilityWeights& a, const ProbabilityWeights& b) {
    return a.space_ == b.space_ && a.masses_ == b.masses_;
  }
  /// Lexicographic order on masses; used for canonical sorting.
  friend bool operator<(const ProbabilityWeights& a, const ProbabilityWeights& b);

 private:
  ProbabilityWeights(FiniteSpace space, std::vector<Rat> masses)
      : space_(std::move(space)), masses_(std::move(masses)) {}
  FiniteSpace space_;
  std::vector<Rat> masses_;
};

/// Finite, duplicate-free family of probabilities on one space, kept in
/// canonical (lexicographic) order.
class CredalSet {
 public:
  explicit CredalSet(std::vector<ProbabilityWeights> members);

  const FiniteSpace& space() const { return members_.front().space(); }
  const std::vector<ProbabilityWeights>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const ProbabilityWeights& member(std::size_t i) const { return members_[i]; }

  friend bool operator==(const CredalSet& a, const CredalSet& b) {
    return a.members_ == b.members_;
  }

 private:
  std::vector<ProbabilityWeights> members_;
};

/// Eventwise minimum of the family. Always a capacity.
Capacity lower_envelope(const CredalSet& m);
/// Eventwise maximum; equals the conjugate of the lower envelope.
Capacity upper_envelope(const CredalSet& m);

enum class CoreProvenance { MarginalHull, GeneralEnumeration };

/// The core of a capacity as an explicit, canonically sorted vertex list.
struct CorePolytope {
  FiniteSpace space;
  std::vector<ProbabilityWeights> vertices;
  CoreProvenance provenance = CoreProvenance::GeneralEnumeration;
  bool empty = true;

  Rat min_over(std::uint32_t event_mask) const;
  Rat max_over(std::uint32_t event_mask) const;
  Rat min_expectation(const RealFunction& f) const;
  Rat max_expectation(const RealFunction& f) const;
  CredalSet as_credal() const { return CredalSet(vertices); }
};

struct CoreOptions {
  /// Cap for the general vertex enumeration (2^n constraints).
  int max_n_general = 5;
  /// Cap for the n! marginal-vector sweep used on convex capacities.
  int max_n_marginal = 8;
};

/// Marginal vector for a point ordering: allocates the capacity increments
/// along the order. For convex capacities these are exactly the core vertices.
ProbabilityWeights marginal_vector(const Capacity& nu, const std::vector<int>& order);

/// Core via the n! marginal-vector sweep (requires a convex capacity).
CorePolytope core_marginal(const Capacity& nu, const CoreOptions& opts = {});

/// Core via exact vertex enumeration of
///   { x >= 0, sum x = 1, x(A) >= nu(A) for all events A }.
/// Works for any capacity; capped at max_n_general points.
CorePolytope core_enumerate(const Capacity& nu, const CoreOptions& opts = {});

/// Dispatches to the marginal sweep for convex capacities and the general
/// enumeration otherwise.
CorePolytope core(const Capacity& nu, const CoreOptions& opts = {});

/// Exactness verdict: core nonempty and its eventwise minimum recovers nu.
struct ExactnessVerdict {
  bool exact = false;
  bool core_empty = false;
  std::optional<std::uint32_t> witness_event;
  Rat achieved_minimum;  // at the witness event
  CorePolytope core;
};

ExactnessVerdict is_exact(const Capacity& nu, const CoreOptions& opts = {});

/// A prior is a capacity over a finite family of measures treated as the
/// points of a FiniteSpace.
using Prior = Capacity;

/// Predictive capacity: A -> Choquet integral over the family of P -> P(A).
Capacity predictive(const Prior& rho, const CredalSet& family);

/// Mixture measure sum_i pi({i}) * family_i induced by weights on the family.
ProbabilityWeights mixture(const ProbabilityWeights& pi, const CredalSet& family);

/// For a convex prior: { mixture(pi, family) : pi vertex of core(rho) }.
/// Its lower envelope equals predictive(rho, family) eventwise (verified).
CredalSet lower_probability_decomposition(const Prior& rho, const CredalSet& family,
                                          const CoreOptions& opts = {});

}  // namespace ergocap
