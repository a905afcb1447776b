#include <doctest.h>

#include <algorithm>

#include "ergocap/credal.hpp"
#include "ergocap/dynamics.hpp"
#include "ergocap/gen.hpp"

using namespace ergocap;

namespace {

FiniteMap two_swaps() {
  // (0 1)(2 3)
  return FiniteMap::from_table(FiniteSpace(4), {1, 0, 3, 2});
}

CredalSet cycle_uniforms_of_two_swaps() {
  return ergodic_measures(two_swaps()).as_credal();
}

}  // namespace

TEST_CASE("lower envelope of a singleton is the member itself") {
  Rng rng(2);
  FiniteSpace space(4);
  auto p = gen_probability(rng, space);
  CredalSet m({p});
  CHECK(lower_envelope(m) == p.as_capacity());
}

TEST_CASE("lower envelope of the two uniforms") {
  FiniteSpace space(4);
  CredalSet m({ProbabilityWeights::uniform(space, 0b0011),
               ProbabilityWeights::uniform(space, 0b1100)});
  Capacity nu = lower_envelope(m);
  CHECK(nu.at(0b0101) == rat(1, 2));  // one point from each block
  CHECK(nu.at(0b0011) == 0);
  // eventwise min against the members, directly
  for (std::uint32_t e = 0; e <= nu.full_mask(); ++e)
    CHECK(nu.at(e) == std::min(m.member(0).of(e), m.member(1).of(e)));
}

TEST_CASE("the invariant envelope of the double swap") {
  CredalSet m = cycle_uniforms_of_two_swaps();
  REQUIRE(m.size() == 2);
  Capacity nu = lower_envelope(m);
  for (std::uint32_t e = 0; e <= nu.full_mask(); ++e) {
    Rat expected = std::min(m.member(0).of(e), m.member(1).of(e));
    CHECK(nu.at(e) == expected);
  }
  CHECK(nu.at(0b0011) == 0);
  CHECK(nu.at(0b1111) == 1);
}

TEST_CASE("core of an additive capacity is its single probability") {
  Rng rng(5);
  FiniteSpace space(4);
  auto p = gen_probability(rng, space);
  CorePolytope poly = core(p.as_capacity());
  REQUIRE(poly.vertices.size() == 1);
  CHECK(poly.vertices.front() == p);
  CHECK(poly.provenance == CoreProvenance::MarginalHull);
}

TEST_CASE("core of the squared-uniform distortion on two points") {
  FiniteSpace space(2);
  Capacity nu = Capacity::from_values(space, {Rat(0), rat(1, 4), rat(1, 4), Rat(1)});
  CorePolytope poly = core(nu);
  REQUIRE(poly.vertices.size() == 2);
  CHECK(poly.vertices[0].masses() == std::vector<Rat>{rat(1, 4), rat(3, 4)});
  CHECK(poly.vertices[1].masses() == std::vector<Rat>{rat(3, 4), rat(1, 4)});
}

TEST_CASE("core of the two-dirac envelope is the segment between the diracs") {
  FiniteSpace space(3);
  Capacity nu = Capacity::unanimity(space, 0b011);
  CorePolytope convex_route = core_marginal(nu);
  CorePolytope general_route = core_enumerate(nu);
  REQUIRE(convex_route.vertices.size() == 2);
  CHECK(convex_route.vertices == general_route.vertices);
  for (const auto& v : convex_route.vertices) CHECK(v.mass(2) == 0);
}

TEST_CASE("marginal sweep and general enumeration agree on convex capacities") {
  Rng rng(13);
  for (int i = 0; i < 15; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));  // up to n = 5
    Capacity nu = gen_convex(rng, space);
    CorePolytope a = core_marginal(nu);
    CorePolytope b = core_enumerate(nu);
    CHECK(a.vertices == b.vertices);
  }
}

TEST_CASE("every marginal vector of a convex capacity dominates it") {
  Rng rng(17);
  for (int i = 0; i < 10; ++i) {
    FiniteSpace space(3 + static_cast<int>(rng.below(3)));
    Capacity nu = gen_convex(rng, space);
    CorePolytope poly = core_marginal(nu);
    for (const auto& v : poly.vertices)
      for (std::uint32_t e = 0; e <= nu.full_mask(); ++e) CHECK(v.of(e) >= nu.at(e));
  }
}

TEST_CASE("an infeasible capacity has an empty core") {
  FiniteSpace space(2);
  Capacity nu =
      Capacity::from_values(space, {Rat(0), rat(9, 10), rat(9, 10), Rat(1)});
  ExactnessVerdict v = is_exact(nu);
  CHECK(v.core_empty);
  CHECK_FALSE(v.exact);
}

TEST_CASE("convex capacities are exact") {
  Rng rng(19);
  for (int i = 0; i < 12; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = gen_convex(rng, space);
    CHECK(is_exact(nu).exact);
  }
}

TEST_CASE("lower envelopes are exact and recovered by their cores") {
  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    FiniteMap tau = gen_map(rng, 4);
    std::vector<ProbabilityWeights> ms;
    for (int j = 0; j < 3; ++j) ms.push_back(gen_invariant_mixture(rng, tau));
    Capacity nu = lower_envelope(CredalSet(std::move(ms)));
    ExactnessVerdict v = is_exact(nu);
    CHECK(v.exact);
    CHECK(lower_envelope(v.core.as_credal()) == nu);
  }
}

TEST_CASE("envelope-core sandwich") {
  Rng rng(29);
  for (int i = 0; i < 8; ++i) {
    FiniteMap tau = gen_map(rng, 4);
    std::vector<ProbabilityWeights> ms;
    for (int j = 0; j < 2; ++j) ms.push_back(gen_invariant_mixture(rng, tau));
    Capacity nu = lower_envelope(CredalSet(std::move(ms)));
    Capacity bar = conjugate(nu);
    CorePolytope poly = core(nu);
    for (const auto& p : poly.vertices)
      for (std::uint32_t e = 0; e <= nu.full_mask(); ++e) {
        CHECK(nu.at(e) <= p.of(e));
        CHECK(p.of(e) <= bar.at(e));
      }
  }
}

TEST_CASE("choquet of a convex capacity is the minimum over core vertices") {
  Rng rng(31);
  for (int i = 0; i < 12; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = gen_convex(rng, space);
    CorePolytope poly = core(nu);
    for (int j = 0; j < 3; ++j) {
      RealFunction f = gen_function(rng, space);
      CHECK(choquet(nu, f) == poly.min_expectation(f));
      CHECK(choquet_upper(nu, f) == poly.max_expectation(f));
    }
  }
}

TEST_CASE("predictive of a point-mass prior is the selected member") {
  CredalSet family = cycle_uniforms_of_two_swaps();
  FiniteSpace family_space(2);
  Prior rho = ProbabilityWeights::dirac(family_space, 1).as_capacity();
  CHECK(predictive(rho, family) == family.member(1).as_capacity());
}

TEST_CASE("predictive of a unanimity prior is the lower envelope") {
  CredalSet family = cycle_uniforms_of_two_swaps();
  FiniteSpace family_space(2);
  Prior rho = Capacity::unanimity(family_space, 0b11);
  CHECK(predictive(rho, family) == lower_envelope(family));
}

TEST_CASE("predictive of the quarter-quarter prior") {
  CredalSet family = cycle_uniforms_of_two_swaps();
  FiniteSpace family_space(2);
  Prior rho = Capacity::from_values(family_space,
                                    {Rat(0), rat(1, 4), rat(1, 4), Rat(1)});
  REQUIRE(rho.convex());
  Capacity nu = predictive(rho, family);

  // two-point Choquet arithmetic; the event below contains one whole cycle
  // and half of the other
  CHECK(nu.at(0b0111) == rat(5, 8));
  CHECK(nu.at(0b0100) == rat(1, 8));

  // not convex: the classic pair of half-half events
  CHECK_FALSE(nu.convex());
  CHECK(nu.at(0b0101) + nu.at(0b0110) > nu.at(0b0111) + nu.at(0b0100));
}

TEST_CASE("decomposition of an additive prior is the single mixture") {
  CredalSet family = cycle_uniforms_of_two_swaps();
  FiniteSpace family_space(2);
  auto pi = ProbabilityWeights::from_masses(family_space, {rat(1, 3), rat(2, 3)});
  CredalSet dec = lower_probability_decomposition(pi.as_capacity(), family);
  REQUIRE(dec.size() == 1);
  CHECK(dec.member(0) == mixture(pi, family));
}

TEST_CASE("decomposition of a unanimity prior recovers the family extremes") {
  CredalSet family = cycle_uniforms_of_two_swaps();
  FiniteSpace family_space(2);
  Prior rho = Capacity::unanimity(family_space, 0b11);
  CredalSet dec = lower_probability_decomposition(rho, family);
  CHECK(dec == family);
}

TEST_CASE("decomposition envelope reproduces the predictive eventwise") {
  CredalSet family = cycle_uniforms_of_two_swaps();
  FiniteSpace family_space(2);
  Prior rho = Capacity::from_values(family_space,
                                    {Rat(0), rat(1, 4), rat(1, 4), Rat(1)});
  CredalSet dec = lower_probability_decomposition(rho, family);
  REQUIRE(dec.size() == 2);
  Capacity env = lower_envelope(dec);
  Capacity pred = predictive(rho, family);
  for (std::uint32_t e = 0; e <= env.full_mask(); ++e) CHECK(env.at(e) == pred.at(e));
}

TEST_CASE("credal sets deduplicate and keep canonical order") {
  FiniteSpace space(3);
  auto a = ProbabilityWeights::dirac(space, 0);
  auto b = ProbabilityWeights::dirac(space, 2);
  CredalSet m({b, a, b, a});
  REQUIRE(m.size() == 2);
  CHECK(m.member(0) < m.member(1));
}
