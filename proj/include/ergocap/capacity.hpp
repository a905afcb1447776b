#pragma once

#include <atomic>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ergocap/rat.hpp"
#include "ergocap/space.hpp"

namespace ergocap {

/// Witness pair of events for a failed set-function property.
struct PairWitness {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

/// Resolved structural flags for a set function, with witnesses on failure.
struct FlagReport {
  bool is_capacity = false;
  bool is_convex = false;
  bool is_additive = false;
  /// A subset-of-B pair with value(A) > value(B), or an endpoint failure note.
  std::optional<PairWitness> monotonicity_witness;
  std::optional<PairWitness> convexity_witness;
  std::optional<PairWitness> additivity_witness;
  std::string note;
};

/// Upper bound on the space size for the O(4^n) pairwise scans. The default
/// keeps scans at desk scale; callers override per call, or process-wide
/// through set_pair_scan_cap (the CLI --n-cap flag).
constexpr int kDefaultPairScanCap = 10;
int pair_scan_cap();
void set_pair_scan_cap(int cap);

/// Classifies a raw set function: capacity axioms, convexity, additivity.
/// Values outside [0,1] raise InvalidSetFunction naming the event.
/// A negative cap means the configured process-wide cap.
FlagReport classify(const FiniteSpace& space, const std::vector<Rat>& values,
                    int pair_scan_cap = -1);

/// A capacity on the power set of a finite space. Values are exact
/// rationals, immutable after construction. Structural flags are resolved
/// lazily and cached write-once.
///
/// Monotone-limit continuity (including continuity at the full space) is
/// automatic on finite spaces, so those refinements of the capacity
/// vocabulary are vacuous here and carry no representation. A probability
/// and a probability measure likewise coincide.
class Capacity {
 public:
  /// Validates the capacity axioms; throws InvalidSetFunction otherwise.
  static Capacity from_values(FiniteSpace space, std::vector<Rat> values);

  /// Additive capacity from per-point masses (masses must sum to 1).
  static Capacity additive_from_masses(FiniteSpace space,
                                       const std::vector<Rat>& masses);

  /// Vacuous capacity: 0 everywhere except 1 at the full space.
  static Capacity vacuous(FiniteSpace space);

  /// Unanimity capacity u_K: 1 exactly on supersets of K.
  static Capacity unanimity(FiniteSpace space, std::uint32_t k_mask);

  const FiniteSpace& space() const { return space_; }
  int n() const { return space_.n(); }
  std::uint32_t full_mask() const { return space_.full_mask(); }

  const Rat& at(std::uint32_t event_mask) const { return values_[event_mask]; }
  const Rat& at(const Event& e) const;
  const std::vector<Rat>& values() const { return values_; }

  bool convex(int pair_scan_cap = -1) const;
  bool additive(int pair_scan_cap = -1) const;
  bool totally_monotone() const;

  Capacity(const Capacity& other)
      : space_(other.space_),
        values_(other.values_),
        convex_(other.convex_.load()),
        additive_(other.additive_.load()),
        totally_monotone_(other.totally_monotone_.load()) {}
  Capacity(Capacity&& other) noexcept
      : space_(std::move(other.space_)),
        values_(std::move(other.values_)),
        convex_(other.convex_.load()),
        additive_(other.additive_.load()),
        totally_monotone_(other.totally_monotone_.load()) {}
  Capacity& operator=(const Capacity& other) {
    space_ = other.space_;
    values_ = other.values_;
    convex_ = other.convex_.load();
    additive_ = other.additive_.load();
    totally_monotone_ = other.totally_monotone_.load();
    return *this;
  }
  Capacity& operator=(Capacity&& other) noexcept {
    space_ = std::move(other.space_);
    values_ = std::move(other.values_);
    convex_ = other.convex_.load();
    additive_ = other.additive_.load();
    totally_monotone_ = other.totally_monotone_.load();
    return *this;
  }

  friend bool operator==(const Capacity& a, const Capacity& b) {
    return a.space_ == b.space_ && a.values_ == b.values_;
  }

 private:
  Capacity(FiniteSpace space, std::vector<Rat> values)
      : space_(std::move(space)), values_(std::move(values)) {}

  FiniteSpace space_;
  std::vector<Rat> values_;
  // write-once tri-state caches: -1 unresolved, then 0 or 1 forever;
  // concurrent resolution recomputes the same pure value
  mutable std::atomic<signed char> convex_{-1};
  mutable std::atomic<signed char> additive_{-1};
  mutable std::atomic<signed char> totally_monotone_{-1};
};

/// Full flag report for a capacity; enforces the additive => convex
/// consistency check.
FlagReport classify(const Capacity& nu, int pair_scan_cap = -1);

/// Conjugate capacity A -> 1 - nu(complement of A).
Capacity conjugate(const Capacity& nu);

/// Moebius masses of a capacity: the unique m with
///   sum over B subset of A of m(B) = nu(A)  for every event A.
struct MobiusTransform {
  FiniteSpace space;
  std::vector<Rat> mass;

  /// True iff every mass is nonnegative (belief-function case).
  bool totally_monotone() const;
  /// Index of a negative mass, if any.
  std::optional<std::uint32_t> negative_mass_event() const;
};

MobiusTransform mobius(const Capacity& nu);

/// Inverse direction: set function from masses (zeta transform). The result
/// is validated as a capacity.
Capacity capacity_from_mobius(const FiniteSpace& space,
                              const std::vector<Rat>& mass);

/// A bounded real function on a finite space: one exact value per point.
struct RealFunction {
  FiniteSpace space;
  std::vector<Rat> values;

  RealFunction(FiniteSpace s, std::vector<Rat> v);

  static RealFunction constant(const FiniteSpace& s, const Rat& c);
  static RealFunction indicator(const Event& e);

  const Rat& at(int point) const { return values[static_cast<std::size_t>(point)]; }
  RealFunction plus_constant(const Rat& c) const;
  RealFunction negate() const;
  RealFunction add(const RealFunction& other) const;
  Rat max_abs() const;

  friend bool operator==(const RealFunction& a, const RealFunction& b) {
    return a.space == b.space && a.values == b.values;
  }
};

/// True iff no pair of points is ranked oppositely by f and g.
bool comonotone(const RealFunction& f, const RealFunction& g);

/// Choquet integral of f against nu. With the distinct values of f sorted
/// descending v_1 > ... > v_m and A_i = {f >= v_i}:
///   sum_{i=1}^{m-1} (v_i - v_{i+1}) nu(A_i) + v_m.
/// Exact; handles negative values because nu(full space) = 1.
Rat choquet(const Capacity& nu, const RealFunction& f);

/// Choquet integral against the conjugate; equals -choquet(nu, -f).
Rat choquet_upper(const Capacity& nu, const RealFunction& f);

/// Upper-level-set mask {point : f(point) >= threshold}.
std::uint32_t upper_level_set(const RealFunction& f, const Rat& threshold);

}  // namespace ergocap
