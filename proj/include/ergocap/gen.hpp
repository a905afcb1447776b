#pragma once

#include <string>

#include "ergocap/invariance.hpp"
#include "ergocap/io.hpp"
#include "ergocap/rng.hpp"

namespace ergocap {

/// Seeded instance generators. Every generator validates its output, so a
/// generated instance always satisfies its advertised structure.
enum class GenKind {
  Map,                 // fixed-point-rich random map
  Permutation,         // random bijection (cycle-only map)
  Convex,              // random convex capacity
  ConvexNonTM,         // convex with some negative Moebius mass (n >= 3)
  Belief,              // random nonnegative Moebius masses
  InvariantEnvelope,   // lower envelope of invariant mixtures + its map
  CredalInvariant,     // credal set of invariant mixtures + its map
  DistortionSquare,    // square distortion of the uniform, swap-style map
  EpsContamination,    // (1-eps) invariant P + eps vacuous
  UnanimityFixed,      // unanimity over fixed points of a transient map
};

GenKind gen_kind_from_string(const std::string& s);
std::string to_string(GenKind kind);

/// Random map; with fixed_point_rich, a sizable share of points are fixed
/// and the rest drain into them or form short cycles.
FiniteMap gen_map(Rng& rng, int n, bool fixed_point_rich = true);
FiniteMap gen_permutation(Rng& rng, int n);

/// Random rational weights with denominators bounded by denom_bound.
ProbabilityWeights gen_probability(Rng& rng, const FiniteSpace& space,
                                   int denom_bound = 12);

/// Random convex mixture of the cycle uniforms of tau (hence invariant).
ProbabilityWeights gen_invariant_mixture(Rng& rng, const FiniteMap& tau,
                                         int denom_bound = 12);

/// Random function with small rational values.
RealFunction gen_function(Rng& rng, const FiniteSpace& space, int denom_bound = 8,
                          int value_bound = 6);

Capacity gen_belief(Rng& rng, const FiniteSpace& space, int focal_count = 4,
                    int denom_bound = 16);
Capacity gen_convex(Rng& rng, const FiniteSpace& space);
Capacity gen_convex_non_tm(Rng& rng, const FiniteSpace& space);

/// A full generated instance.
InstanceBundle generate_instance(GenKind kind, std::uint64_t seed, int n);

}  // namespace ergocap
