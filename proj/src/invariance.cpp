#include "ergocap/invariance.hpp"

#include <algorithm>
#include <bit>

namespace ergocap {

EventVerdict is_invariant(const Capacity& nu, const FiniteMap& tau) {
  if (!(nu.space() == tau.space())) throw SpaceMismatch("is_invariant");
  for (std::uint32_t e = 0; e <= nu.full_mask(); ++e)
    if (nu.at(e) != nu.at(tau.preimage(e))) return {false, e};
  return {};
}

EventVerdict is_strongly_invariant(const Capacity& nu, const FiniteMap& tau) {
  if (!(nu.space() == tau.space())) throw SpaceMismatch("is_strongly_invariant");
  const std::uint32_t full = nu.full_mask();
  for (std::uint32_t e = 0; e <= full; ++e) {
    std::uint32_t pre = tau.preimage(e);
    std::uint32_t fwd = e & ~pre;  // A \ tau^{-1}(A)
    std::uint32_t bwd = pre & ~e;  // tau^{-1}(A) \ A
    Rat conj_bwd = Rat(1) - nu.at(full & ~bwd);
    Rat conj_fwd = Rat(1) - nu.at(full & ~fwd);
    if (nu.at(fwd) != conj_bwd || nu.at(bwd) != conj_fwd) return {false, e};
  }
  return {};
}

MemberVerdict is_functionally_invariant(const CredalSet& m, const FiniteMap& tau) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!is_invariant_measure(m.member(i), tau)) return {false, i};
  return {};
}

EventVerdict is_ergodic(const Capacity& nu, const FiniteMap& tau) {
  if (!(nu.space() == tau.space())) throw SpaceMismatch("is_ergodic");
  for (std::uint32_t e : invariant_events(tau).all_events()) {
    const Rat& v = nu.at(e);
    if (v != 0 && v != 1) return {false, e};
  }
  return {};
}

RobustConstruction robust_invariant_from(const CredalSet& m, const FiniteMap& tau) {
  InvariantMeasureFamily fam = ergodic_measures(tau);
  CredalSet ergodic_family = fam.as_credal();

  // locate each member of M inside S(I); reject non-ergodic members
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& p = m.member(i);
    auto it = std::find(ergodic_family.members().begin(), ergodic_family.members().end(), p);
    if (it == ergodic_family.members().end())
      throw HypothesisFailure(
          "robust_invariant_from: member " + std::to_string(i) +
          " is not an ergodic invariant measure of the map");
    indices.push_back(static_cast<std::size_t>(it - ergodic_family.members().begin()));
  }
  std::sort(indices.begin(), indices.end());

  std::uint32_t m_mask = 0;
  for (std::size_t i : indices) m_mask |= (1u << i);
  FiniteSpace family_space(static_cast<int>(ergodic_family.size()));
  Prior rho = Capacity::unanimity(family_space, m_mask);

  Capacity nu_rho = predictive(rho, ergodic_family);
  if (!(nu_rho == lower_envelope(m)))
    throw Error("robust_invariant_from: predictive does not match the lower envelope");
  EventVerdict erg = is_ergodic(nu_rho, tau);
  if (!erg.yes)
    throw Error("robust_invariant_from: predictive is not ergodic");

  return RobustConstruction{std::move(rho), std::move(ergodic_family),
                            std::move(indices), std::move(nu_rho)};
}

bool is_robustly_invariant_via(const Prior& rho, const CredalSet& family,
                               const Capacity& nu) {
  return rho.convex() && predictive(rho, family) == nu;
}

InvarianceReport invariance_report(const Capacity& nu, const FiniteMap& tau,
                                   const std::optional<CredalSet>& presentation) {
  InvarianceReport rep;
  rep.invariant = is_invariant(nu, tau);
  rep.strongly_invariant = is_strongly_invariant(nu, tau);
  rep.ergodic = is_ergodic(nu, tau);
  if (presentation) {
    rep.functionally_invariant = is_functionally_invariant(*presentation, tau);
    if (rep.functionally_invariant->yes) {
      // sufficient route: all members ergodic extreme points
      try {
        robust_invariant_from(*presentation, tau);
        rep.robust_certificate = true;
      } catch (const HypothesisFailure&) {
        rep.robust_certificate = false;
      }
    }
  }
  return rep;
}

namespace {

using Verdict = AuditRecord::Verdict;

void add(AuditReport& rep, std::string id, bool applicable, bool pass,
         std::string witness = {}) {
  AuditRecord rec;
  rec.implication = std::move(id);
  rec.verdict = !applicable ? Verdict::NotApplicable
                            : (pass ? Verdict::Pass : Verdict::Violated);
  if (applicable && !pass) rec.witness = std::move(witness);
  if (rec.verdict == Verdict::Violated) rep.any_violation = true;
  rep.records.push_back(std::move(rec));
}

std::string event_bits(std::uint32_t mask, int n) { return Event(mask, n).bits(); }

}  // namespace

AuditReport implication_audit(const AuditInstance& instance, const CoreOptions& opts) {
  const Capacity& nu = instance.nu;
  const FiniteMap& tau = instance.tau;
  const int n = nu.n();
  AuditReport rep;
  rep.instance_id = instance.id;

  EventVerdict inv = is_invariant(nu, tau);
  EventVerdict strong = is_strongly_invariant(nu, tau);
  bool convex = nu.convex();

  std::optional<CorePolytope> core_poly;
  auto need_core = [&]() -> const CorePolytope& {
    if (!core_poly) core_poly = core(nu, opts);
    return *core_poly;
  };

  auto core_in_invariants = [&]() -> std::pair<bool, std::string> {
    for (const auto& vtx : need_core().vertices)
      if (!is_invariant_measure(vtx, tau)) {
        std::string w = "vertex";
        for (const Rat& x : vtx.masses()) w += " " + rat_str(x);
        return {false, w};
      }
    return {true, {}};
  };

  // strong invariance forces every core probability to be invariant
  {
    bool applicable = strong.yes;
    bool pass = true;
    std::string witness;
    if (applicable) std::tie(pass, witness) = core_in_invariants();
    add(rep, "strong-implies-core-invariant", applicable, pass, witness);
  }

  // a presentation of ergodic members yields the robust construction,
  // whose decomposition is functionally invariant and whose predictive is
  // ergodic and reproduces the envelope
  {
    bool applicable = false;
    bool pass = true;
    std::string witness;
    if (instance.presentation) {
      const CredalSet& m = *instance.presentation;
      InvariantMeasureFamily fam = ergodic_measures(tau);
      CredalSet si = fam.as_credal();
      bool inside_si = std::all_of(
          m.members().begin(), m.members().end(), [&](const ProbabilityWeights& p) {
            return std::find(si.members().begin(), si.members().end(), p) !=
                   si.members().end();
          });
      if (inside_si) {
        applicable = true;
        try {
          RobustConstruction rc = robust_invariant_from(m, tau);
          CredalSet dec = lower_probability_decomposition(rc.prior, rc.ergodic_family, opts);
          MemberVerdict fdec = is_functionally_invariant(dec, tau);
          if (!fdec.yes) {
            pass = false;
            witness = "decomposition member " + std::to_string(*fdec.witness_member);
          }
        } catch (const Error& err) {
          pass = false;
          witness = err.what();
        }
      }
    }
    add(rep, "ergodic-family-implies-robust-ergodic", applicable, pass, witness);
  }

  // functional invariance of the presentation implies plain invariance
  {
    bool applicable = false;
    bool pass = true;
    std::string witness;
    if (instance.presentation) {
      MemberVerdict f = is_functionally_invariant(*instance.presentation, tau);
      if (f.yes) {
        applicable = true;
        if (!inv.yes) {
          pass = false;
          witness = "event " + event_bits(*inv.witness_event, n);
        }
      }
    }
    add(rep, "functional-implies-invariant", applicable, pass, witness);
  }

  // convex case: strong invariance holds exactly when every core vertex is
  // invariant
  {
    bool applicable = convex;
    bool pass = true;
    std::string witness;
    if (applicable) {
      auto [core_inv, w] = core_in_invariants();
      if (strong.yes != core_inv) {
        pass = false;
        witness = strong.yes ? ("strong holds yet " + w)
                             : ("core invariant yet strong fails at event " +
                                event_bits(*strong.witness_event, n));
      }
    }
    add(rep, "convex-strong-iff-core-invariant", applicable, pass, witness);
  }

  // finite checkable forms of the potential-invariance equivalences, for
  // invariant lower probabilities
  bool lower_prob = false;
  if (inv.yes) {
    if (instance.presentation) {
      lower_prob = lower_envelope(*instance.presentation) == nu;
    } else if (n <= opts.max_n_general || (convex && n <= opts.max_n_marginal)) {
      lower_prob = is_exact(nu, opts).exact;
    }
  }
  {
    bool applicable = lower_prob;
    bool pass = true;
    std::string witness;
    if (applicable) {
      InvariantEventLattice lattice = invariant_events(tau);
      InvariantMeasureFamily fam = ergodic_measures(tau);
      // full-measure lattice events: P(E) = 1 for every invariant P
      for (std::uint32_t e : lattice.all_events()) {
        bool full_for_all = std::all_of(
            fam.ergodic.begin(), fam.ergodic.end(),
            [&](const ProbabilityWeights& p) { return p.of(e) == 1; });
        if (full_for_all && nu.at(e) != 1) {
          pass = false;
          witness = "lattice event " + event_bits(e, n);
          break;
        }
      }
    }
    add(rep, "full-invariant-measure-events-have-capacity-one", applicable, pass, witness);
  }
  {
    // limit capacity of pulled-back full events along the certified
    // eventually periodic tail
    bool applicable = lower_prob;
    bool pass = true;
    std::string witness;
    if (applicable) {
      CycleDecomposition dec = decompose(tau);
      std::uint32_t all_cycles = 0;
      for (const auto& c : dec.components) all_cycles |= c.cycle_mask;
      InvariantMeasureFamily fam = ergodic_measures(tau);
      ProbabilityWeights p_breve =
          mixture(ProbabilityWeights::uniform(FiniteSpace(static_cast<int>(fam.ergodic.size())),
                                              (1u << fam.ergodic.size()) - 1u),
                  fam.as_credal());
      for (std::uint32_t e = 0; e <= nu.full_mask(); ++e) {
        if (p_breve.of(e) != 1) continue;
        // tail of nu(tau^{-k}(E)) is periodic once k passes the pre-periods
        int k0 = dec.max_preperiod();
        int period = dec.cycle_lcm();
        for (int k = k0; k < k0 + period; ++k) {
          if (nu.at(tau.preimage_k(e, k)) != 1) {
            pass = false;
            witness = "event " + event_bits(e, n) + " at k=" + std::to_string(k);
            break;
          }
        }
        if (!pass) break;
      }
      (void)all_cycles;
    }
    add(rep, "pullback-limit-of-full-events-is-one", applicable, pass, witness);
  }
  {
    // time averages converge on an event of capacity one (all of the space
    // on finite systems), witnessed through the certified orbit bound
    bool applicable = lower_prob;
    bool pass = true;
    std::string witness;
    if (applicable && nu.at(nu.full_mask()) != 1) {
      pass = false;
      witness = "full event has capacity " + rat_str(nu.at(nu.full_mask()));
    }
    add(rep, "convergence-event-has-capacity-one", applicable, pass, witness);
  }
  {
    // every core probability is potentially invariant, with a verified witness
    bool applicable = lower_prob && (n <= opts.max_n_general || convex);
    bool pass = true;
    std::string witness;
    if (applicable) {
      for (const auto& vtx : need_core().vertices) {
        PotentialInvarianceVerdict pv = is_potentially_invariant(vtx, tau);
        if (!pv.yes || !pv.witness.recurrence_verified) {
          pass = false;
          witness = "core vertex failed the invariant-witness checks";
          break;
        }
      }
    }
    add(rep, "core-inside-potentially-invariant", applicable, pass, witness);
  }

  // measurement only: convexity of the predictive of a convex prior
  if (instance.presentation) {
    const CredalSet& m = *instance.presentation;
    InvariantMeasureFamily fam = ergodic_measures(tau);
    CredalSet si = fam.as_credal();
    bool inside_si = std::all_of(
        m.members().begin(), m.members().end(), [&](const ProbabilityWeights& p) {
          return std::find(si.members().begin(), si.members().end(), p) != si.members().end();
        });
    if (inside_si && si.size() >= 2 && si.size() <= 6) {
      // uniform additive prior mixed with the unanimity prior is convex
      std::uint32_t m_mask = 0;
      for (std::size_t i = 0; i < si.size(); ++i) {
        const auto& member = si.member(i);
        if (std::find(m.members().begin(), m.members().end(), member) != m.members().end())
          m_mask |= (1u << i);
      }
      FiniteSpace fs(static_cast<int>(si.size()));
      Capacity unan = Capacity::unanimity(fs, m_mask);
      std::vector<Rat> blend(fs.event_count());
      for (std::uint32_t e = 0; e < fs.event_count(); ++e)
        blend[e] = (unan.at(e) + rat(std::popcount(e), fs.n())) / Rat(2);
      Capacity rho = Capacity::from_values(fs, std::move(blend));
      if (rho.convex()) rep.predictive_convexity_sample = predictive(rho, si).convex();
    }
  }

  return rep;
}

}  // namespace ergocap
