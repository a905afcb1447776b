#include <doctest.h>

#include <bit>

#include "ergocap/gen.hpp"
#include "ergocap/invariance.hpp"

using namespace ergocap;

namespace {

FiniteMap two_swaps() { return FiniteMap::from_table(FiniteSpace(4), {1, 0, 3, 2}); }
FiniteMap transient3() { return FiniteMap::from_table(FiniteSpace(3), {0, 1, 0}); }

Capacity squared_uniform4() {
  FiniteSpace space(4);
  std::vector<Rat> values(space.event_count());
  for (std::uint32_t e = 0; e < space.event_count(); ++e)
    values[e] = rat_pow(rat(std::popcount(e), 4), 2);
  return Capacity::from_values(space, std::move(values));
}

}  // namespace

TEST_CASE("every capacity is invariant under the identity") {
  Rng rng(3);
  for (int i = 0; i < 8; ++i) {
    FiniteSpace space(2 + static_cast<int>(rng.below(4)));
    Capacity nu = gen_belief(rng, space);
    CHECK(is_invariant(nu, FiniteMap::identity(space)).yes);
  }
}

TEST_CASE("distorted invariant measures stay invariant") {
  Capacity nu = squared_uniform4();
  CHECK(is_invariant(nu, two_swaps()).yes);
}

TEST_CASE("a dirac is not invariant under the swap of its atom") {
  FiniteSpace space(2);
  Capacity nu = ProbabilityWeights::dirac(space, 0).as_capacity();
  FiniteMap swap = FiniteMap::from_table(space, {1, 0});
  EventVerdict v = is_invariant(nu, swap);
  CHECK_FALSE(v.yes);
  REQUIRE(v.witness_event.has_value());
  CHECK(nu.at(*v.witness_event) != nu.at(swap.preimage(*v.witness_event)));
}

TEST_CASE("additive invariant measures are strongly invariant") {
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    FiniteMap tau = gen_map(rng, 2 + static_cast<int>(rng.below(5)));
    Capacity nu = gen_invariant_mixture(rng, tau).as_capacity();
    CHECK(is_invariant(nu, tau).yes);
    CHECK(is_strongly_invariant(nu, tau).yes);
  }
}

TEST_CASE("the squared distortion separates plain from strong invariance") {
  Capacity nu = squared_uniform4();
  FiniteMap tau = two_swaps();
  CHECK(nu.convex());
  CHECK(is_invariant(nu, tau).yes);

  EventVerdict strong = is_strongly_invariant(nu, tau);
  CHECK_FALSE(strong.yes);
  REQUIRE(strong.witness_event.has_value());
  // replay the witness: one of the two displayed equalities fails
  std::uint32_t e = *strong.witness_event;
  std::uint32_t pre = tau.preimage(e);
  Capacity bar = conjugate(nu);
  bool first = nu.at(e & ~pre) == bar.at(pre & ~e);
  bool second = nu.at(pre & ~e) == bar.at(e & ~pre);
  CHECK_FALSE((first && second));

  // consistent with the core criterion: some marginal vector is not invariant
  CorePolytope poly = core(nu);
  bool found_non_invariant = false;
  for (const auto& vtx : poly.vertices)
    if (!is_invariant_measure(vtx, tau)) found_non_invariant = true;
  CHECK(found_non_invariant);
}

TEST_CASE("the two-dirac envelope on the transient map is strongly invariant") {
  FiniteSpace space(3);
  Capacity nu = Capacity::unanimity(space, 0b011);
  CHECK(is_strongly_invariant(nu, transient3()).yes);
}

TEST_CASE("functional invariance checks every member") {
  FiniteMap tau = two_swaps();
  CredalSet si = ergodic_measures(tau).as_credal();
  CHECK(is_functionally_invariant(si, tau).yes);

  std::vector<ProbabilityWeights> with_bad = si.members();
  with_bad.push_back(ProbabilityWeights::dirac(FiniteSpace(4), 0));
  MemberVerdict v = is_functionally_invariant(CredalSet(std::move(with_bad)), tau);
  CHECK_FALSE(v.yes);
  REQUIRE(v.witness_member.has_value());
}

TEST_CASE("robust construction from one cycle uniform") {
  FiniteMap tau = two_swaps();
  CredalSet si = ergodic_measures(tau).as_credal();
  CredalSet m({si.member(0)});
  RobustConstruction rc = robust_invariant_from(m, tau);
  CHECK(rc.predictive_capacity == si.member(0).as_capacity());
  CHECK(is_ergodic(rc.predictive_capacity, tau).yes);
}

TEST_CASE("robust construction from both cycle uniforms") {
  FiniteMap tau = two_swaps();
  CredalSet si = ergodic_measures(tau).as_credal();
  RobustConstruction rc = robust_invariant_from(si, tau);
  CHECK(rc.predictive_capacity == lower_envelope(si));
  CHECK(rc.predictive_capacity.at(0b0011) == 0);
  CHECK(rc.predictive_capacity.at(0b1111) == 1);
  CHECK(is_ergodic(rc.predictive_capacity, tau).yes);
}

TEST_CASE("robust construction on the transient map") {
  FiniteMap tau = transient3();
  CredalSet si = ergodic_measures(tau).as_credal();
  RobustConstruction rc = robust_invariant_from(si, tau);
  // lattice {empty, {1}, {0,2}, all}: values 0, 0, 0, 1
  CHECK(rc.predictive_capacity.at(0b010) == 0);
  CHECK(rc.predictive_capacity.at(0b101) == 0);
  CHECK(rc.predictive_capacity.at(0b111) == 1);
  CHECK(is_ergodic(rc.predictive_capacity, tau).yes);
}

TEST_CASE("robust construction rejects non-ergodic members") {
  FiniteMap tau = two_swaps();
  Rng rng(9);
  // a strict mixture of the two cycle uniforms is invariant but not ergodic
  ProbabilityWeights mix = ProbabilityWeights::from_masses(
      FiniteSpace(4), {rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)});
  REQUIRE(is_invariant_measure(mix, tau));
  CHECK_THROWS_AS(robust_invariant_from(CredalSet({mix}), tau), HypothesisFailure);
  (void)rng;
}

TEST_CASE("a supplied prior candidate certifies robust invariance") {
  FiniteMap tau = two_swaps();
  CredalSet si = ergodic_measures(tau).as_credal();
  FiniteSpace family_space(2);

  Prior quarter = Capacity::from_values(family_space,
                                        {Rat(0), rat(1, 4), rat(1, 4), Rat(1)});
  Capacity nu = predictive(quarter, si);
  CHECK(is_robustly_invariant_via(quarter, si, nu));
  CHECK(is_invariant(nu, tau).yes);  // robust implies invariant

  // a wrong candidate fails
  Prior unan = Capacity::unanimity(family_space, 0b11);
  CHECK_FALSE(is_robustly_invariant_via(unan, si, nu));
}

TEST_CASE("ergodicity under a single cycle is automatic") {
  FiniteMap cycle = FiniteMap::from_table(FiniteSpace(4), {1, 2, 3, 0});
  Rng rng(11);
  Capacity nu = gen_belief(rng, FiniteSpace(4));
  CHECK(is_ergodic(nu, cycle).yes);
}

TEST_CASE("contamination keeps stationarity but loses ergodicity") {
  FiniteMap tau = two_swaps();
  ProbabilityWeights p = ProbabilityWeights::uniform(FiniteSpace(4), 0b0011);
  Rat eps = rat(1, 5);
  std::vector<Rat> values(16);
  for (std::uint32_t e = 0; e < 16; ++e) values[e] = (Rat(1) - eps) * p.of(e);
  values[15] = 1;
  Capacity nu = Capacity::from_values(FiniteSpace(4), std::move(values));

  CHECK(is_invariant(nu, tau).yes);
  EventVerdict erg = is_ergodic(nu, tau);
  CHECK_FALSE(erg.yes);
  REQUIRE(erg.witness_event.has_value());
  CHECK(nu.at(*erg.witness_event) == rat(4, 5));
}

TEST_CASE("implication audit is clean on seeded instances") {
  static const GenKind kinds[] = {GenKind::InvariantEnvelope, GenKind::UnanimityFixed,
                                  GenKind::DistortionSquare, GenKind::EpsContamination,
                                  GenKind::Convex, GenKind::CredalInvariant};
  for (int i = 0; i < 36; ++i) {
    int n = 3 + (i % 3);
    InstanceBundle bundle = generate_instance(kinds[i % 6],
                                              1000 + static_cast<std::uint64_t>(i), n);
    AuditReport rep = implication_audit(
        AuditInstance{bundle.id, bundle.nu, bundle.tau, bundle.presentation});
    for (const auto& rec : rep.records) {
      INFO(bundle.id, " ", rec.implication, " ", rec.witness);
      CHECK(rec.verdict != AuditRecord::Verdict::Violated);
    }
  }
}

TEST_CASE("audit of an additive invariant instance applies the full chain") {
  Rng rng(13);
  FiniteMap tau = two_swaps();
  ProbabilityWeights p = gen_invariant_mixture(rng, tau);
  AuditInstance instance{"additive", p.as_capacity(), tau, CredalSet({p})};
  AuditReport rep = implication_audit(instance);
  CHECK_FALSE(rep.any_violation);
  // the four notions coincide for an invariant probability
  InvarianceReport four = invariance_report(p.as_capacity(), tau, CredalSet({p}));
  CHECK(four.invariant.yes);
  CHECK(four.strongly_invariant.yes);
  REQUIRE(four.functionally_invariant.has_value());
  CHECK(four.functionally_invariant->yes);
}

TEST_CASE("audit flags nothing on the separating distortion and records the vertex") {
  InstanceBundle bundle = generate_instance(GenKind::DistortionSquare, 5, 4);
  CHECK(is_invariant(bundle.nu, bundle.tau).yes);
  CHECK_FALSE(is_strongly_invariant(bundle.nu, bundle.tau).yes);
  AuditReport rep = implication_audit(
      AuditInstance{bundle.id, bundle.nu, bundle.tau, bundle.presentation});
  CHECK_FALSE(rep.any_violation);
}
