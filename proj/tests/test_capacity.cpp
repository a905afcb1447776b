#include <doctest.h>

#include <bit>

#include "ergocap/capacity.hpp"
#include "ergocap/credal.hpp"
#include "ergocap/gen.hpp"

using namespace ergocap;

namespace {

// independent oracle: quadratic scan over all event pairs
bool convex_bruteforce(const Capacity& nu, std::uint32_t* wa = nullptr,
                       std::uint32_t* wb = nullptr) {
  for (std::uint32_t a = 0; a <= nu.full_mask(); ++a)
    for (std::uint32_t b = 0; b <= nu.full_mask(); ++b)
      if (nu.at(a | b) + nu.at(a & b) < nu.at(a) + nu.at(b)) {
        if (wa) *wa = a;
        if (wb) *wb = b;
        return false;
      }
  return true;
}

// independent oracle: direct subset-sum reconstruction from Moebius masses
Rat zeta_direct(const MobiusTransform& m, std::uint32_t event) {
  Rat out(0);
  for (std::uint32_t b = 0; b < m.mass.size(); ++b)
    if ((b & event) == b) out += m.mass[b];
  return out;
}

Capacity min_of_two_uniforms_n4() {
  FiniteSpace space(4);
  auto p1 = ProbabilityWeights::uniform(space, 0b0011);
  auto p2 = ProbabilityWeights::uniform(space, 0b1100);
  std::vector<Rat> values(space.event_count());
  for (std::uint32_t e = 0; e < space.event_count(); ++e)
    values[e] = std::min(p1.of(e), p2.of(e));
  return Capacity::from_values(space, std::move(values));
}

}  // namespace

TEST_CASE("classify: unanimity capacity is convex but not additive") {
  FiniteSpace space(3);
  Capacity u = Capacity::unanimity(space, 0b011);
  FlagReport rep = classify(u);
  CHECK(rep.is_capacity);
  CHECK(rep.is_convex);
  CHECK_FALSE(rep.is_additive);
  REQUIRE(rep.additivity_witness.has_value());
  // the witness pair reproduces the failure
  auto [a, b] = *rep.additivity_witness;
  CHECK((a & b) == 0);
  CHECK(u.at(a | b) != u.at(a) + u.at(b));
}

TEST_CASE("classify: min of two uniforms on four points is not convex") {
  Capacity nu = min_of_two_uniforms_n4();
  FlagReport rep = classify(nu);
  CHECK(rep.is_capacity);
  CHECK_FALSE(rep.is_convex);
  REQUIRE(rep.convexity_witness.has_value());
  auto [a, b] = *rep.convexity_witness;
  CHECK(nu.at(a | b) + nu.at(a & b) < nu.at(a) + nu.at(b));
  CHECK_FALSE(convex_bruteforce(nu));

  // the pair {0,2} and {1,2} violates convexity: 1/2 + 1/2 > 1/2 + 0
  std::uint32_t wa = 0b101, wb = 0b110;
  CHECK(nu.at(wa) == rat(1, 2));
  CHECK(nu.at(wb) == rat(1, 2));
  CHECK(nu.at(wa | wb) + nu.at(wa & wb) == rat(1, 2));
}

TEST_CASE("classify: probability weights are additive hence convex") {
  FiniteSpace space(4);
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    auto p = gen_probability(rng, space);
    FlagReport rep = classify(p.as_capacity());
    CHECK(rep.is_capacity);
    CHECK(rep.is_convex);
    CHECK(rep.is_additive);
  }
}

TEST_CASE("classify rejects values outside the unit interval") {
  FiniteSpace space(2);
  std::vector<Rat> values = {Rat(0), rat(3, 2), Rat(0), Rat(1)};
  CHECK_THROWS_AS(classify(space, values), InvalidSetFunction);
  CHECK_THROWS_WITH_AS(classify(space, values),
                       doctest::Contains("10"), InvalidSetFunction);
}

TEST_CASE("classify verdicts match the brute-force oracle on seeded instances") {
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(3)));
    // random monotone-ish raw values: a belief function or a perturbed table
    Capacity base = gen_belief(rng, space);
    CHECK(classify(base).is_convex == convex_bruteforce(base));
  }
}

TEST_CASE("conjugate: probabilities are self-conjugate") {
  FiniteSpace space(4);
  Rng rng(3);
  auto p = gen_probability(rng, space).as_capacity();
  CHECK(conjugate(p) == p);
  // so the upper integral collapses onto the lower one
  RealFunction f = gen_function(rng, space);
  CHECK(choquet_upper(p, f) == choquet(p, f));
}

TEST_CASE("conjugate: vacuous flips to the sure capacity") {
  FiniteSpace space(3);
  Capacity vac = Capacity::vacuous(space);
  Capacity sure = conjugate(vac);
  for (std::uint32_t e = 1; e <= space.full_mask(); ++e) CHECK(sure.at(e) == 1);
  CHECK(sure.at(0) == 0);
  CHECK(conjugate(sure) == vac);
}

TEST_CASE("conjugate of a lower envelope is the eventwise maximum") {
  Rng rng(19);
  FiniteMap tau = gen_map(rng, 5);
  std::vector<ProbabilityWeights> members;
  for (int i = 0; i < 3; ++i) members.push_back(gen_invariant_mixture(rng, tau));
  CredalSet m(std::move(members));
  Capacity lower = lower_envelope(m);
  Capacity conj = conjugate(lower);
  for (std::uint32_t e = 0; e <= lower.full_mask(); ++e) {
    Rat mx = m.member(0).of(e);
    for (std::size_t i = 1; i < m.size(); ++i) mx = std::max(mx, m.member(i).of(e));
    CHECK(conj.at(e) == mx);
  }
}

TEST_CASE("conjugation is an involution") {
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = gen_belief(rng, space);
    CHECK(conjugate(conjugate(nu)) == nu);
  }
}

TEST_CASE("mobius: unanimity puts unit mass on its focal set") {
  FiniteSpace space(4);
  Capacity u = Capacity::unanimity(space, 0b0110);
  MobiusTransform m = mobius(u);
  for (std::uint32_t e = 0; e < space.event_count(); ++e)
    CHECK(m.mass[e] == (e == 0b0110 ? Rat(1) : Rat(0)));
  CHECK(m.totally_monotone());
}

TEST_CASE("mobius: additive capacities have singleton masses") {
  FiniteSpace space(3);
  Capacity p = Capacity::additive_from_masses(space, {rat(1, 2), rat(1, 3), rat(1, 6)});
  MobiusTransform m = mobius(p);
  CHECK(m.mass[0b001] == rat(1, 2));
  CHECK(m.mass[0b010] == rat(1, 3));
  CHECK(m.mass[0b100] == rat(1, 6));
  for (std::uint32_t e = 0; e < space.event_count(); ++e)
    if (std::popcount(e) != 1) CHECK(m.mass[e] == 0);
}

TEST_CASE("mobius inversion round-trips exactly") {
  Rng rng(31);
  for (int i = 0; i < 25; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = (i % 2) ? gen_belief(rng, space) : gen_convex(rng, space);
    MobiusTransform m = mobius(nu);
    for (std::uint32_t e = 0; e < space.event_count(); ++e)
      CHECK(zeta_direct(m, e) == nu.at(e));
    CHECK(capacity_from_mobius(space, m.mass) == nu);
  }
}

TEST_CASE("a convex capacity can carry negative Moebius mass") {
  Rng rng(37);
  FiniteSpace space(4);
  Capacity nu = gen_convex_non_tm(rng, space);
  CHECK(nu.convex());
  MobiusTransform m = mobius(nu);
  auto bad = m.negative_mass_event();
  REQUIRE(bad.has_value());
  CHECK(m.mass[*bad] < 0);
  // the inversion identity still holds
  for (std::uint32_t e = 0; e < space.event_count(); ++e)
    CHECK(zeta_direct(m, e) == nu.at(e));
}

TEST_CASE("totally monotone implies convex on generated instances") {
  Rng rng(41);
  for (int i = 0; i < 30; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = gen_belief(rng, space);
    CHECK(nu.totally_monotone());
    CHECK(nu.convex());
  }
}

TEST_CASE("choquet: constants and indicators") {
  FiniteSpace space(4);
  Rng rng(43);
  Capacity nu = gen_belief(rng, space);
  CHECK(choquet(nu, RealFunction::constant(space, rat(7, 3))) == rat(7, 3));
  for (std::uint32_t e = 1; e < space.event_count(); ++e)
    CHECK(choquet(nu, RealFunction::indicator(Event(e, 4))) == nu.at(e));
}

TEST_CASE("choquet: the two-dirac envelope instance") {
  // envelope of the point masses at 0 and 1: value 1 exactly on supersets
  // of {0,1}
  FiniteSpace space(3);
  Capacity nu = Capacity::unanimity(space, 0b011);
  RealFunction f(space, {Rat(1), Rat(0), Rat(5)});
  CHECK(choquet(nu, f) == 0);

  // frozen from the core-vertex oracle: the core is the segment between the
  // two point masses, so the upper integral is 1
  CorePolytope poly = core(nu);
  REQUIRE(poly.vertices.size() == 2);
  CHECK(poly.min_expectation(f) == 0);
  CHECK(poly.max_expectation(f) == 1);
  CHECK(choquet_upper(nu, f) == 1);
}

TEST_CASE("choquet handles negative values and ties") {
  FiniteSpace space(4);
  Capacity nu = min_of_two_uniforms_n4();
  RealFunction f(space, {rat(-3, 2), rat(-3, 2), Rat(2), Rat(2)});
  // two level sets only: {f >= 2} = {2,3}, then everything
  Rat expected = rat(-3, 2) + (Rat(2) - rat(-3, 2)) * nu.at(0b1100);
  CHECK(choquet(nu, f) == expected);
}

TEST_CASE("choquet: constant additivity") {
  Rng rng(47);
  for (int i = 0; i < 20; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = gen_belief(rng, space);
    RealFunction f = gen_function(rng, space);
    Rat c = rat(static_cast<long>(rng.below(19)) - 9, 4);
    CHECK(choquet(nu, f.plus_constant(c)) == choquet(nu, f) + c);
  }
}

TEST_CASE("duality: upper integral equals the reflected lower integral") {
  Rng rng(53);
  for (int i = 0; i < 25; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = (i % 2) ? gen_belief(rng, space) : gen_convex(rng, space);
    RealFunction f = gen_function(rng, space);
    CHECK(choquet_upper(nu, f) == -choquet(nu, f.negate()));
  }
}

TEST_CASE("choquet_upper: vacuous capacity integrates to the maximum") {
  FiniteSpace space(4);
  Capacity vac = Capacity::vacuous(space);
  Rng rng(59);
  for (int i = 0; i < 10; ++i) {
    RealFunction f = gen_function(rng, space);
    Rat rmax = f.values[0];
    for (const Rat& v : f.values) rmax = std::max(rmax, v);
    CHECK(choquet_upper(vac, f) == rmax);
  }
}

TEST_CASE("comonotonic additivity") {
  Rng rng(61);
  for (int i = 0; i < 30; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = (i % 2) ? gen_belief(rng, space) : gen_convex(rng, space);
    // build a comonotone pair: both functions nondecreasing along one
    // random ranking of the points
    std::vector<int> order(static_cast<std::size_t>(space.n()));
    for (int p = 0; p < space.n(); ++p) order[static_cast<std::size_t>(p)] = p;
    for (int p = space.n() - 1; p > 0; --p)
      std::swap(order[static_cast<std::size_t>(p)],
                order[rng.below(static_cast<std::uint64_t>(p + 1))]);
    std::vector<Rat> fv(static_cast<std::size_t>(space.n()));
    std::vector<Rat> gv(static_cast<std::size_t>(space.n()));
    Rat facc(0), gacc(0);
    for (int rank = 0; rank < space.n(); ++rank) {
      facc += rat(static_cast<long>(rng.below(5)), 3);
      gacc += rat(static_cast<long>(rng.below(7)), 2);
      fv[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] = facc;
      gv[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] = gacc;
    }
    RealFunction f(space, fv), g(space, gv);
    REQUIRE(comonotone(f, g));
    CHECK(choquet(nu, f.add(g)) == choquet(nu, f) + choquet(nu, g));
  }
}
