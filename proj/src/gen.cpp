#include "ergocap/gen.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ergocap {

GenKind gen_kind_from_string(const std::string& s) {
  static const std::map<std::string, GenKind> table = {
      {"map", GenKind::Map},
      {"permutation", GenKind::Permutation},
      {"convex", GenKind::Convex},
      {"convex-nontm", GenKind::ConvexNonTM},
      {"belief", GenKind::Belief},
      {"invariant-envelope", GenKind::InvariantEnvelope},
      {"credal-invariant", GenKind::CredalInvariant},
      {"distortion-square", GenKind::DistortionSquare},
      {"eps-contamination", GenKind::EpsContamination},
      {"unanimity-fixed", GenKind::UnanimityFixed},
  };
  auto it = table.find(s);
  if (it == table.end()) throw Error("unknown generator kind '" + s + "'");
  return it->second;
}

std::string to_string(GenKind kind) {
  switch (kind) {
    case GenKind::Map: return "map";
    case GenKind::Permutation: return "permutation";
    case GenKind::Convex: return "convex";
    case GenKind::ConvexNonTM: return "convex-nontm";
    case GenKind::Belief: return "belief";
    case GenKind::InvariantEnvelope: return "invariant-envelope";
    case GenKind::CredalInvariant: return "credal-invariant";
    case GenKind::DistortionSquare: return "distortion-square";
    case GenKind::EpsContamination: return "eps-contamination";
    case GenKind::UnanimityFixed: return "unanimity-fixed";
  }
  throw Error("unknown generator kind");
}

FiniteMap gen_map(Rng& rng, int n, bool fixed_point_rich) {
  std::vector<int> table(static_cast<std::size_t>(n));
  if (fixed_point_rich) {
    // at least one fixed point; remaining points either stay fixed, drain
    // into an earlier point, or join a 2-cycle
    int fixed = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    for (int p = 0; p < n; ++p) {
      if (p < fixed) {
        table[static_cast<std::size_t>(p)] = p;
      } else {
        table[static_cast<std::size_t>(p)] = static_cast<int>(rng.below(
            static_cast<std::uint64_t>(p)));
      }
    }
  } else {
    for (int p = 0; p < n; ++p)
      table[static_cast<std::size_t>(p)] =
          static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  }
  return FiniteMap::from_table(FiniteSpace(n), std::move(table));
}

FiniteMap gen_permutation(Rng& rng, int n) {
  std::vector<int> table(static_cast<std::size_t>(n));
  std::iota(table.begin(), table.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(table[static_cast<std::size_t>(i)],
              table[rng.below(static_cast<std::uint64_t>(i + 1))]);
  return FiniteMap::from_table(FiniteSpace(n), std::move(table));
}

ProbabilityWeights gen_probability(Rng& rng, const FiniteSpace& space, int denom_bound) {
  std::vector<long> raw(static_cast<std::size_t>(space.n()));
  long total = 0;
  while (total == 0) {
    for (long& r : raw) {
      r = static_cast<long>(rng.below(static_cast<std::uint64_t>(denom_bound + 1)));
      total += r;
    }
  }
  std::vector<Rat> masses(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) masses[i] = rat(raw[i], total);
  return ProbabilityWeights::from_masses(space, std::move(masses));
}

ProbabilityWeights gen_invariant_mixture(Rng& rng, const FiniteMap& tau, int denom_bound) {
  InvariantMeasureFamily fam = ergodic_measures(tau);
  FiniteSpace family_space(static_cast<int>(fam.ergodic.size()));
  ProbabilityWeights pi = gen_probability(rng, family_space, denom_bound);
  return mixture(pi, fam.as_credal());
}

RealFunction gen_function(Rng& rng, const FiniteSpace& space, int denom_bound,
                          int value_bound) {
  std::vector<Rat> values(static_cast<std::size_t>(space.n()));
  for (Rat& v : values) {
    long den = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(denom_bound)));
    long num = static_cast<long>(rng.below(
                   static_cast<std::uint64_t>(2 * value_bound * den + 1))) -
               value_bound * den;
    v = rat(num, den);
  }
  return RealFunction(space, std::move(values));
}

Capacity gen_belief(Rng& rng, const FiniteSpace& space, int focal_count, int denom_bound) {
  std::vector<Rat> mass(space.event_count(), Rat(0));
  std::vector<long> raw(static_cast<std::size_t>(focal_count));
  long total = 0;
  while (total == 0) {
    for (long& r : raw) {
      r = static_cast<long>(rng.below(static_cast<std::uint64_t>(denom_bound + 1)));
      total += r;
    }
  }
  for (long r : raw) {
    std::uint32_t focal =
        1u + static_cast<std::uint32_t>(rng.below(space.full_mask()));
    mass[focal] += rat(r, total);
  }
  return capacity_from_mobius(space, mass);
}

namespace {

/// Symmetric capacity from a nondecreasing increment profile; such profiles
/// are convex, and many have negative Moebius masses at the larger levels.
Capacity symmetric_convex(Rng& rng, const FiniteSpace& space) {
  const int n = space.n();
  // increments d_1 <= d_2 <= ... <= d_n, rational, summing to 1
  std::vector<long> raw(static_cast<std::size_t>(n));
  long total = 0;
  while (total == 0) {
    for (long& r : raw) {
      r = static_cast<long>(rng.below(8));
      total += r;
    }
  }
  std::sort(raw.begin(), raw.end());
  std::vector<Rat> level(static_cast<std::size_t>(n + 1), Rat(0));
  for (int k = 1; k <= n; ++k)
    level[static_cast<std::size_t>(k)] =
        level[static_cast<std::size_t>(k - 1)] + rat(raw[static_cast<std::size_t>(k - 1)], total);
  std::vector<Rat> values(space.event_count());
  for (std::uint32_t e = 0; e < space.event_count(); ++e)
    values[e] = level[static_cast<std::size_t>(std::popcount(e))];
  return Capacity::from_values(space, std::move(values));
}

}  // namespace

Capacity gen_convex(Rng& rng, const FiniteSpace& space) {
  Capacity out = (rng.below(2) == 0) ? gen_belief(rng, space)
                                     : symmetric_convex(rng, space);
  if (!out.convex()) throw Error("gen_convex: construction is not convex");
  return out;
}

Capacity gen_convex_non_tm(Rng& rng, const FiniteSpace& space) {
  if (space.n() < 3)
    throw Error("gen_convex_non_tm: needs n >= 3 (on two points convex equals totally monotone)");
  for (int attempt = 0; attempt < 64; ++attempt) {
    Capacity cand = symmetric_convex(rng, space);
    if (cand.convex() && !cand.totally_monotone()) return cand;
  }
  // deterministic fallback: level profile 0, ..., 0, 1/2, 1 is convex with a
  // negative mass at the top level
  std::vector<Rat> values(space.event_count());
  for (std::uint32_t e = 0; e < space.event_count(); ++e) {
    int k = std::popcount(e);
    if (k == space.n())
      values[e] = 1;
    else if (k == space.n() - 1)
      values[e] = rat(1, 2);
    else
      values[e] = 0;
  }
  Capacity out = Capacity::from_values(space, std::move(values));
  if (!out.convex() || out.totally_monotone())
    throw Error("gen_convex_non_tm: fallback failed");
  return out;
}

InstanceBundle generate_instance(GenKind kind, std::uint64_t seed, int n) {
  Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(kind) + 101,
                       static_cast<std::uint64_t>(n));
  FiniteSpace space(n);
  std::string id = to_string(kind) + "-s" + std::to_string(seed) + "-n" + std::to_string(n);

  switch (kind) {
    case GenKind::Map: {
      FiniteMap tau = gen_map(rng, n);
      InvariantMeasureFamily fam = ergodic_measures(tau);
      return {id, lower_envelope(fam.as_credal()), std::move(tau), fam.as_credal()};
    }
    case GenKind::Permutation: {
      FiniteMap tau = gen_permutation(rng, n);
      InvariantMeasureFamily fam = ergodic_measures(tau);
      return {id, lower_envelope(fam.as_credal()), std::move(tau), fam.as_credal()};
    }
    case GenKind::Convex:
      return {id, gen_convex(rng, space), FiniteMap::identity(space), std::nullopt};
    case GenKind::ConvexNonTM:
      return {id, gen_convex_non_tm(rng, space), FiniteMap::identity(space), std::nullopt};
    case GenKind::Belief:
      return {id, gen_belief(rng, space), FiniteMap::identity(space), std::nullopt};
    case GenKind::InvariantEnvelope: {
      FiniteMap tau = gen_map(rng, n);
      int members = 2 + static_cast<int>(rng.below(3));
      std::vector<ProbabilityWeights> ms;
      for (int i = 0; i < members; ++i) ms.push_back(gen_invariant_mixture(rng, tau));
      CredalSet credal(std::move(ms));
      return {id, lower_envelope(credal), std::move(tau), std::move(credal)};
    }
    case GenKind::CredalInvariant: {
      FiniteMap tau = gen_map(rng, n);
      int members = 2 + static_cast<int>(rng.below(3));
      std::vector<ProbabilityWeights> ms;
      for (int i = 0; i < members; ++i) ms.push_back(gen_invariant_mixture(rng, tau));
      CredalSet credal(std::move(ms));
      return {id, lower_envelope(credal), std::move(tau), std::move(credal)};
    }
    case GenKind::DistortionSquare: {
      // pairs swapped by the map; the uniform measure stays invariant and
      // the squared distortion separates plain from strong invariance
      std::vector<int> table(static_cast<std::size_t>(n));
      std::iota(table.begin(), table.end(), 0);
      for (int p = 0; p + 1 < n; p += 2) {
        table[static_cast<std::size_t>(p)] = p + 1;
        table[static_cast<std::size_t>(p + 1)] = p;
      }
      FiniteMap tau = FiniteMap::from_table(space, std::move(table));
      std::vector<Rat> values(space.event_count());
      for (std::uint32_t e = 0; e < space.event_count(); ++e)
        values[e] = rat_pow(rat(std::popcount(e), n), 2);
      return {id, Capacity::from_values(space, std::move(values)), std::move(tau),
              std::nullopt};
    }
    case GenKind::EpsContamination: {
      // bijective dynamics keep proper events proper under preimages, which
      // the contamination needs for plain invariance
      FiniteMap tau = gen_permutation(rng, n);
      ProbabilityWeights p = gen_invariant_mixture(rng, tau);
      Rat eps = rat(1 + static_cast<long>(rng.below(4)), 10);
      std::vector<Rat> values(space.event_count());
      for (std::uint32_t e = 0; e < space.event_count(); ++e)
        values[e] = (Rat(1) - eps) * p.of(e);
      values[space.full_mask()] = 1;
      return {id, Capacity::from_values(space, std::move(values)), std::move(tau),
              std::nullopt};
    }
    case GenKind::UnanimityFixed: {
      // fixed points plus transients draining into them
      int fixed = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                          std::max(1, n - 2))));
      fixed = std::min(fixed, n);
      std::vector<int> table(static_cast<std::size_t>(n));
      for (int p = 0; p < n; ++p)
        table[static_cast<std::size_t>(p)] =
            p < fixed ? p : static_cast<int>(rng.below(static_cast<std::uint64_t>(fixed)));
      FiniteMap tau = FiniteMap::from_table(space, std::move(table));
      int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(fixed)));
      std::uint32_t k_mask = 0;
      std::vector<ProbabilityWeights> diracs;
      for (int i = 0; i < k; ++i) {
        k_mask |= (1u << i);
        diracs.push_back(ProbabilityWeights::dirac(space, i));
      }
      return {id, Capacity::unanimity(space, k_mask), std::move(tau),
              CredalSet(std::move(diracs))};
    }
  }
  throw Error("generate_instance: unknown kind");
}

}  // namespace ergocap
