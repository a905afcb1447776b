#pragma once

#include <vector>

#include "ergocap/credal.hpp"

namespace ergocap {

/// A total transformation on a finite space, given by its transition table.
class FiniteMap {
 public:
  static FiniteMap from_table(FiniteSpace space, std::vector<int> table);
  /// Identity on n points.
  static FiniteMap identity(FiniteSpace space);

  const FiniteSpace& space() const { return space_; }
  int n() const { return space_.n(); }
  int apply(int point) const { return table_[static_cast<std::size_t>(point)]; }
  const std::vector<int>& table() const { return table_; }

  /// Mask of tau^{-1}(A) for an event mask A.
  std::uint32_t preimage(std::uint32_t event_mask) const;
  /// k-fold preimage.
  std::uint32_t preimage_k(std::uint32_t event_mask, int k) const;
  /// Forward iterate tau^k(point).
  int iterate(int point, int k) const;

  friend bool operator==(const FiniteMap& a, const FiniteMap& b) {
    return a.space_ == b.space_ && a.table_ == b.table_;
  }

 private:
  FiniteMap(FiniteSpace space, std::vector<int> table)
      : space_(std::move(space)), table_(std::move(table)) {}
  FiniteSpace space_;
  std::vector<int> table_;
};

/// Functional-graph structure of a finite map: weakly connected components,
/// each with its unique cycle, and per-point pre-periods.
struct CycleDecomposition {
  struct Component {
    std::vector<int> points;  // sorted
    std::vector<int> cycle;   // cycle order starting at its smallest point
    std::uint32_t point_mask = 0;
    std::uint32_t cycle_mask = 0;
  };
  std::vector<Component> components;  // numbered by smallest contained point
  std::vector<int> component_of;      // per point
  std::vector<int> preperiod;         // per point: steps to enter the cycle

  int cycle_lcm() const;
  int max_preperiod() const;
};

CycleDecomposition decompose(const FiniteMap& tau);

/// The lattice of invariant events: exactly the unions of weak components.
class InvariantEventLattice {
 public:
  explicit InvariantEventLattice(const CycleDecomposition& dec, int n);

  int n() const { return n_; }
  const std::vector<std::uint32_t>& component_masks() const { return blocks_; }
  bool contains(std::uint32_t event_mask) const;
  /// All 2^k lattice events (k = component count), ascending by mask.
  std::vector<std::uint32_t> all_events() const;
  std::size_t block_count() const { return blocks_.size(); }

 private:
  int n_;
  std::vector<std::uint32_t> blocks_;
};

InvariantEventLattice invariant_events(const FiniteMap& tau);

/// Test-oracle route: scans all 2^n events for tau^{-1}(A) = A.
std::vector<std::uint32_t> invariant_events_bruteforce(const FiniteMap& tau,
                                                       int scan_cap = 12);

/// The invariant measures of a finite map, represented by their extreme
/// points: the uniform distributions on the cycles.
struct InvariantMeasureFamily {
  std::vector<ProbabilityWeights> ergodic;  // one per cycle, component order

  CredalSet as_credal() const { return CredalSet(ergodic); }
};

InvariantMeasureFamily ergodic_measures(const FiniteMap& tau);

/// Membership in the invariant polytope: the linear fixed-point system
/// P({w}) = sum over tau(u) = w of P({u}), checked exactly.
bool is_invariant_measure(const ProbabilityWeights& p, const FiniteMap& tau);

/// Pushforward measure (tau_* P)(A) = P(tau^{-1}(A)).
ProbabilityWeights pushforward_measure(const FiniteMap& tau, const ProbabilityWeights& p);

/// Limit of time averages: the mean of f over the cycle reachable from each
/// point. Constant on components.
RealFunction birkhoff_limit(const FiniteMap& tau, const RealFunction& f);

/// Certified finite-n deviation bound for the time average at a point:
///   |avg_n - limit| <= (2 lambda pre + 2 lambda (c-1)) / n
/// with lambda = max |f|, pre the point's pre-period, c its cycle length.
Rat birkhoff_error_bound(const FiniteMap& tau, const RealFunction& f, int point, int n);

/// The n-step time average (1/n) sum_{k=1}^{n} f(tau^{k-1}(point)).
Rat time_average(const FiniteMap& tau, const RealFunction& f, int point, int n);

/// Point-indexed family of ergodic measures: uniform on the cycle reachable
/// from each point.
struct CycleKernel {
  std::vector<ProbabilityWeights> at;  // per point
};

CycleKernel cycle_kernel(const FiniteMap& tau);

/// Conditional expectation of f given the invariant lattice, computed via
/// the cycle kernel. Coincides pointwise with birkhoff_limit; the agreement
/// of the two routes is asserted.
RealFunction conditional_expectation(const FiniteMap& tau, const RealFunction& f);

/// Cesaro average P_n(A) = (1/n) sum_{k=0}^{n-1} P(tau^{-k}(A)).
ProbabilityWeights cesaro(const ProbabilityWeights& p, const FiniteMap& tau, int n);

/// Closed-form Cesaro limit with a stabilization certificate.
struct InvariantWitness {
  ProbabilityWeights limit;  // component mass spread uniformly on its cycle
  int n0 = 0;                // smallest index from which the orbit measures repeat
  int period = 1;            // smallest period of the orbit measure sequence
  bool limit_invariant = false;
  bool lattice_agreement = false;  // P(E) = limit(E) on every invariant event
  bool recurrence_verified = false;  // P_{n+L} = (n P_n + L limit)/(n+L) for n >= n0
};

InvariantWitness invariant_witness(const ProbabilityWeights& p, const FiniteMap& tau);

/// On finite deterministic systems every measure is potentially invariant;
/// the verdict carries the verified witness.
struct PotentialInvarianceVerdict {
  bool yes = false;
  InvariantWitness witness;
};

PotentialInvarianceVerdict is_potentially_invariant(const ProbabilityWeights& p,
                                                    const FiniteMap& tau);

}  // namespace ergocap
