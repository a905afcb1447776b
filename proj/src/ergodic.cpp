#include "ergocap/ergodic.hpp"

#include <algorithm>

namespace ergocap {

SuperadditiveSequence::SuperadditiveSequence(SeqKind kind, FiniteMap tau, RealFunction f)
    : kind_(kind), tau_(std::move(tau)), f_(std::move(f)), lambda_(f_.max_abs()) {
  if (!(tau_.space() == f_.space))
    throw SpaceMismatch("SuperadditiveSequence: map and function on different spaces");
}

SeqMode SuperadditiveSequence::declared_mode() const {
  switch (kind_) {
    case SeqKind::AdditiveFromF: return SeqMode::Additive;
    case SeqKind::AbsOfAdditive: return SeqMode::Subadditive;
    case SeqKind::NegAbsOfAdditive: return SeqMode::Superadditive;
  }
  throw Error("SuperadditiveSequence: unknown kind");
}

const std::vector<Rat>& SuperadditiveSequence::additive_row(int n) const {
  if (n < 1) throw Error("SuperadditiveSequence: n must be positive");
  while (static_cast<int>(additive_rows_.size()) < n) {
    int next = static_cast<int>(additive_rows_.size()) + 1;
    std::vector<Rat> row(static_cast<std::size_t>(tau_.n()));
    if (next == 1) {
      row = f_.values;
    } else {
      const std::vector<Rat>& prev = additive_rows_.back();
      for (int p = 0; p < tau_.n(); ++p)
        row[static_cast<std::size_t>(p)] =
            f_.at(p) + prev[static_cast<std::size_t>(tau_.apply(p))];
    }
    additive_rows_.push_back(std::move(row));
  }
  return additive_rows_[static_cast<std::size_t>(n - 1)];
}

Rat SuperadditiveSequence::eval(int n, int point) const {
  const Rat& base = additive_row(n)[static_cast<std::size_t>(point)];
  switch (kind_) {
    case SeqKind::AdditiveFromF: return base;
    case SeqKind::AbsOfAdditive: return rat_abs(base);
    case SeqKind::NegAbsOfAdditive: return -rat_abs(base);
  }
  throw Error("SuperadditiveSequence: unknown kind");
}

RealFunction SuperadditiveSequence::row(int n) const {
  std::vector<Rat> out(static_cast<std::size_t>(tau_.n()));
  for (int p = 0; p < tau_.n(); ++p) out[static_cast<std::size_t>(p)] = eval(n, p);
  return RealFunction(tau_.space(), std::move(out));
}

std::optional<SuperadditiveSequence::ModeViolation>
SuperadditiveSequence::verify_mode(int n_check) const {
  for (int n = 1; n < n_check; ++n) {
    for (int k = 1; n + k <= n_check; ++k) {
      for (int p = 0; p < tau_.n(); ++p) {
        Rat lhs = eval(n + k, p);
        Rat rhs = eval(n, p) + eval(k, tau_.iterate(p, n));
        bool ok = true;
        switch (declared_mode()) {
          case SeqMode::Additive: ok = (lhs == rhs); break;
          case SeqMode::Subadditive: ok = (lhs <= rhs); break;
          case SeqMode::Superadditive: ok = (lhs >= rhs); break;
        }
        if (!ok) return ModeViolation{n, k, p};
      }
    }
  }
  return std::nullopt;
}

std::optional<SuperadditiveSequence::GrowthViolation>
SuperadditiveSequence::verify_growth(int n_check) const {
  for (int n = 1; n <= n_check; ++n) {
    Rat bound = lambda_ * Rat(n);
    for (int p = 0; p < tau_.n(); ++p) {
      Rat v = eval(n, p);
      if (v < -bound || v > bound) return GrowthViolation{n, p};
    }
  }
  return std::nullopt;
}

RealFunction SuperadditiveSequence::limit() const {
  RealFunction mean = birkhoff_limit(tau_, f_);
  if (kind_ == SeqKind::AdditiveFromF) return mean;
  std::vector<Rat> out(mean.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = rat_abs(mean.values[i]);
    if (kind_ == SeqKind::NegAbsOfAdditive) out[i] = -out[i];
  }
  return RealFunction(tau_.space(), std::move(out));
}

namespace {

/// The lower-probability hypothesis: either the supplied presentation has nu
/// as its exact envelope, or the core recovers nu eventwise.
void require_lower_probability(const Capacity& nu,
                               const std::optional<CredalSet>& presentation,
                               const CoreOptions& opts, const char* who) {
  if (presentation) {
    if (!(lower_envelope(*presentation) == nu))
      throw HypothesisFailure(std::string(who) +
                              ": presentation does not present the capacity");
    return;
  }
  ExactnessVerdict v = is_exact(nu, opts);
  if (!v.exact)
    throw HypothesisFailure(std::string(who) + ": not a lower probability (" +
                            (v.core_empty ? "core empty" : "core minimum differs") + ")");
}

BoundEventCertificate bound_event(const Capacity& nu, const RealFunction& values,
                                  const Rat& lower, const Rat& upper) {
  BoundEventCertificate cert;
  cert.lower = lower;
  cert.upper = upper;
  std::uint32_t mask = 0;
  for (int p = 0; p < values.space.n(); ++p)
    if (lower <= values.at(p) && values.at(p) <= upper) mask |= (1u << p);
  cert.event_mask = mask;
  cert.nu_of_event = nu.at(mask);
  cert.pass = (cert.nu_of_event == 1);
  return cert;
}

}  // namespace

ErgodicCertificate verify_pointwise_ergodic(const Capacity& nu, const FiniteMap& tau,
                                            const RealFunction& f,
                                            const std::optional<CredalSet>& presentation,
                                            const CoreOptions& opts) {
  EventVerdict inv = is_invariant(nu, tau);
  if (!inv.yes)
    throw HypothesisFailure("verify_pointwise_ergodic: capacity not invariant, witness event " +
                            Event(*inv.witness_event, nu.n()).bits());
  require_lower_probability(nu, presentation, opts, "verify_pointwise_ergodic");

  ErgodicCertificate cert{birkhoff_limit(tau, f), Rat(0), false, {}, {}, false};
  cert.nu_of_convergence_event = nu.at(nu.full_mask());

  // convergence: orbit averages settle to fstar everywhere; the deviation
  // bound makes the finite-n claim exact
  {
    ClauseResult c{"ET.converge", true, true, true, ""};
    if (cert.nu_of_convergence_event != 1) {
      c.holds = false;
      c.detail = "full event has capacity " + rat_str(cert.nu_of_convergence_event);
    } else {
      for (int p = 0; p < tau.n() && c.holds; ++p)
        for (int n = 1; n <= 64; ++n) {
          Rat dev = rat_abs(time_average(tau, f, p, n) - cert.fstar.at(p));
          if (dev > birkhoff_error_bound(tau, f, p, n)) {
            c.holds = false;
            c.detail = "deviation bound fails at point " + std::to_string(p) +
                       ", n=" + std::to_string(n);
            break;
          }
        }
    }
    cert.clauses.push_back(c);
  }

  EventVerdict erg = is_ergodic(nu, tau);
  cert.ergodic = erg.yes;
  {
    ClauseResult c{"ET.bounds", erg.yes, false, true, ""};
    if (erg.yes) {
      Rat lower = choquet(nu, cert.fstar);
      Rat upper = choquet_upper(nu, cert.fstar);
      cert.bounds = bound_event(nu, cert.fstar, lower, upper);
      c.holds = cert.bounds->pass;
      if (!c.holds)
        c.detail = "bound event has capacity " + rat_str(cert.bounds->nu_of_event);
    }
    cert.clauses.push_back(c);
  }

  cert.all_conclusions_hold = std::all_of(
      cert.clauses.begin(), cert.clauses.end(),
      [](const ClauseResult& c) { return !c.applicable || c.holds; });
  return cert;
}

LatticeLemmaCertificate verify_lattice_lemma(const Capacity& nu, const RealFunction& g,
                                             const std::vector<std::uint32_t>& blocks,
                                             const std::optional<CredalSet>& presentation,
                                             const CoreOptions& opts) {
  require_lower_probability(nu, presentation, opts, "verify_lattice_lemma");

  // blocks partition the space and g is constant on each block
  std::uint32_t covered = 0;
  for (std::uint32_t b : blocks) {
    if (b == 0 || (covered & b))
      throw HypothesisFailure("verify_lattice_lemma: blocks do not partition the space");
    covered |= b;
    int rep = -1;
    for (int p = 0; p < nu.n(); ++p) {
      if (!((b >> p) & 1u)) continue;
      if (rep < 0) rep = p;
      else if (g.at(p) != g.at(rep))
        throw HypothesisFailure("verify_lattice_lemma: function not measurable, block " +
                                Event(b, nu.n()).bits());
    }
  }
  if (covered != nu.full_mask())
    throw HypothesisFailure("verify_lattice_lemma: blocks do not cover the space");

  // nu must be {0,1} on every union of blocks
  const std::size_t k = blocks.size();
  for (std::uint32_t s = 0; s < (1u << k); ++s) {
    std::uint32_t e = 0;
    for (std::size_t i = 0; i < k; ++i)
      if ((s >> i) & 1u) e |= blocks[i];
    const Rat& v = nu.at(e);
    if (v != 0 && v != 1)
      throw HypothesisFailure("verify_lattice_lemma: capacity is " + rat_str(v) +
                              " on lattice event " + Event(e, nu.n()).bits());
  }

  LatticeLemmaCertificate cert;
  Rat min_g = g.values.front();
  for (const Rat& v : g.values) min_g = std::min(min_g, v);
  cert.shift = min_g < 0 ? Rat(-min_g) : Rat(0);
  RealFunction h = g.plus_constant(cert.shift);

  // threshold construction on the shifted nonnegative function
  std::vector<Rat> candidates = h.values;
  candidates.push_back(Rat(0));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  cert.t_star = 0;
  for (const Rat& t : candidates)
    if (nu.at(upper_level_set(h, t)) == 1) cert.t_star = t;

  std::vector<Rat> dual_candidates;
  for (const Rat& v : h.values) dual_candidates.push_back(Rat(-v));
  dual_candidates.push_back(Rat(0));
  std::sort(dual_candidates.begin(), dual_candidates.end());
  dual_candidates.erase(std::unique(dual_candidates.begin(), dual_candidates.end()),
                        dual_candidates.end());
  RealFunction neg_h = h.negate();
  cert.t_star_lower = -h.max_abs();
  for (const Rat& t : dual_candidates) {
    if (t > 0) break;
    if (nu.at(upper_level_set(neg_h, t)) == 1) cert.t_star_lower = t;
  }

  cert.threshold_identity = (cert.t_star == choquet(nu, h)) &&
                            (-cert.t_star_lower == choquet_upper(nu, h));

  cert.lower = choquet(nu, g);
  cert.upper = choquet_upper(nu, g);
  cert.bounds = bound_event(nu, g, cert.lower, cert.upper);
  return cert;
}

BirkhoffEnvelopeCertificate verify_birkhoff_envelope(const Capacity& nu, const FiniteMap& tau,
                                                     const RealFunction& f) {
  if (!nu.convex())
    throw HypothesisFailure("verify_birkhoff_envelope: capacity not convex");
  EventVerdict strong = is_strongly_invariant(nu, tau);
  if (!strong.yes)
    throw HypothesisFailure(
        "verify_birkhoff_envelope: not strongly invariant, witness event " +
        Event(*strong.witness_event, nu.n()).bits());

  BirkhoffEnvelopeCertificate cert{conditional_expectation(tau, f),
                                   false, Rat(0), Rat(0), Rat(0), Rat(0),
                                   false, false, {}, {}, false};

  // conditional-expectation identity on the ergodic extreme points
  {
    InvariantEventLattice lattice = invariant_events(tau);
    InvariantMeasureFamily fam = ergodic_measures(tau);
    cert.conditional_expectation_identity = true;
    for (std::uint32_t e : lattice.all_events()) {
      for (const auto& p : fam.ergodic) {
        Rat lhs(0), rhs(0);
        for (int w = 0; w < tau.n(); ++w) {
          if (!((e >> w) & 1u)) continue;
          lhs += f.at(w) * p.mass(w);
          rhs += cert.fstar.at(w) * p.mass(w);
        }
        if (lhs != rhs) {
          cert.conditional_expectation_identity = false;
          break;
        }
      }
      if (!cert.conditional_expectation_identity) break;
    }
    cert.clauses.push_back({"CE.cond-exp", true, cert.conditional_expectation_identity,
                            true, ""});
  }

  // Choquet integrals of f and fstar coincide, lower and upper
  {
    cert.int_f_lower = choquet(nu, f);
    cert.int_fstar_lower = choquet(nu, cert.fstar);
    cert.int_f_upper = choquet_upper(nu, f);
    cert.int_fstar_upper = choquet_upper(nu, cert.fstar);
    cert.integral_identity = (cert.int_f_lower == cert.int_fstar_lower) &&
                             (cert.int_f_upper == cert.int_fstar_upper);
    cert.clauses.push_back({"CE.integral-identity", true, cert.integral_identity, true,
                            "lower " + rat_str(cert.int_f_lower) + " upper " +
                                rat_str(cert.int_f_upper)});
  }

  // ergodic case: the bound event is stated with the integrals of f itself
  {
    EventVerdict erg = is_ergodic(nu, tau);
    cert.ergodic = erg.yes;
    ClauseResult c{"CE.bounds", erg.yes, false, true, ""};
    if (erg.yes) {
      cert.bounds = bound_event(nu, cert.fstar, cert.int_f_lower, cert.int_f_upper);
      c.holds = cert.bounds->pass;
      if (!c.holds)
        c.detail = "bound event has capacity " + rat_str(cert.bounds->nu_of_event);
    }
    cert.clauses.push_back(c);
  }

  cert.all_conclusions_hold = std::all_of(
      cert.clauses.begin(), cert.clauses.end(),
      [](const ClauseResult& c) { return !c.applicable || c.holds; });
  return cert;
}

KingmanCertificate verify_kingman(const Capacity& nu, const FiniteMap& tau,
                                  const SuperadditiveSequence& s,
                                  const CredalSet& presentation, long horizon,
                                  const Rat& tol, int n_check, const CoreOptions& opts) {
  if (auto mv = s.verify_mode(n_check))
    throw HypothesisFailure("verify_kingman: mode violated at n=" + std::to_string(mv->n) +
                            " k=" + std::to_string(mv->k) +
                            " point=" + std::to_string(mv->point));
  if (auto gv = s.verify_growth(n_check))
    throw HypothesisFailure("verify_kingman: growth bound violated at n=" +
                            std::to_string(gv->n) + " point=" + std::to_string(gv->point));
  MemberVerdict fi = is_functionally_invariant(presentation, tau);
  if (!fi.yes)
    throw HypothesisFailure("verify_kingman: presentation member " +
                            std::to_string(*fi.witness_member) + " not invariant");
  if (!(lower_envelope(presentation) == nu))
    throw HypothesisFailure("verify_kingman: presentation does not present the capacity");

  KingmanCertificate cert{s.limit(), {}, std::nullopt, 0, std::nullopt, 0,
                          std::nullopt, n_check, horizon, tol, false};

  const SeqMode mode = s.declared_mode();
  const bool super_side = (mode != SeqMode::Subadditive);
  const bool sub_side = (mode != SeqMode::Superadditive);
  const bool sharp = nu.convex() && is_strongly_invariant(nu, tau).yes;

  // main clause: S_n/n settles to fstar everywhere, capacity-one event
  {
    ClauseResult c{"KG.converge", true, true, true, ""};
    if (nu.at(nu.full_mask()) != 1) {
      c.holds = false;
      c.detail = "full event capacity " + rat_str(nu.at(nu.full_mask()));
    } else {
      CycleDecomposition dec = decompose(tau);
      int settle = dec.max_preperiod() + dec.cycle_lcm();
      for (int p = 0; p < tau.n() && c.holds; ++p) {
        // exact at multiples of the period once past the pre-period
        int n = settle * 4;
        Rat avg = s.eval(n, p) / Rat(n);
        Rat dev = rat_abs(avg - cert.fstar.at(p));
        Rat bound = (Rat(4) * s.lambda() * Rat(settle)) / Rat(n);
        if (dev > bound) {
          c.holds = false;
          c.detail = "settled deviation too large at point " + std::to_string(p);
        }
      }
    }
    cert.clauses.push_back(c);
  }

  // sup/inf clauses, with the subadditivity of the integral sequence checked
  // on the same prefix as the mode
  const Capacity nu_bar = conjugate(nu);
  Rat target_lower = choquet(nu, cert.fstar);
  Rat target_upper = choquet(nu_bar, cert.fstar);
  {
    ClauseResult c{"KG.sup", super_side && sharp, false, false, ""};
    if (c.applicable) {
      std::optional<Rat> best;
      long best_at = 0;
      for (long n = 1; n <= horizon; ++n) {
        RealFunction fn = s.row(static_cast<int>(n));
        for (Rat& v : fn.values) v /= Rat(n);
        Rat val = choquet(nu, fn);
        if (!best || val > *best) {
          best = val;
          best_at = n;
        }
      }
      cert.sup_of_lower_integrals = best;
      cert.sup_attained_at = best_at;
      bool fekete_ok = true;
      for (int n = 1; n < n_check && fekete_ok; ++n)
        for (int k = 1; n + k <= n_check; ++k) {
          Rat a_nk = -choquet(nu, s.row(n + k));
          Rat a_n = -choquet(nu, s.row(n));
          Rat a_k = -choquet(nu, s.row(k));
          if (a_nk > a_n + a_k) {
            fekete_ok = false;
            c.detail = "integral sequence not subadditive at n=" + std::to_string(n) +
                       " k=" + std::to_string(k);
            break;
          }
        }
      c.holds = fekete_ok && rat_abs(*best - target_lower) <= tol;
      if (fekete_ok && !c.holds)
        c.detail = "sup " + rat_str(*best) + " vs target " + rat_str(target_lower);
    }
    cert.clauses.push_back(c);
  }
  {
    ClauseResult c{"KG.inf", sub_side && sharp, false, false, ""};
    if (c.applicable) {
      std::optional<Rat> best;
      long best_at = 0;
      for (long n = 1; n <= horizon; ++n) {
        RealFunction fn = s.row(static_cast<int>(n));
        for (Rat& v : fn.values) v /= Rat(n);
        Rat val = choquet(nu_bar, fn);
        if (!best || val < *best) {
          best = val;
          best_at = n;
        }
      }
      cert.inf_of_upper_integrals = best;
      cert.inf_attained_at = best_at;
      bool fekete_ok = true;
      for (int n = 1; n < n_check && fekete_ok; ++n)
        for (int k = 1; n + k <= n_check; ++k) {
          Rat a_nk = choquet(nu_bar, s.row(n + k));
          Rat a_n = choquet(nu_bar, s.row(n));
          Rat a_k = choquet(nu_bar, s.row(k));
          if (a_nk > a_n + a_k) {
            fekete_ok = false;
            c.detail = "integral sequence not subadditive at n=" + std::to_string(n) +
                       " k=" + std::to_string(k);
            break;
          }
        }
      c.holds = fekete_ok && rat_abs(*best - target_upper) <= tol;
      if (fekete_ok && !c.holds)
        c.detail = "inf " + rat_str(*best) + " vs target " + rat_str(target_upper);
    }
    cert.clauses.push_back(c);
  }

  // ergodic bound event on the limit values
  {
    EventVerdict erg = is_ergodic(nu, tau);
    ClauseResult c{"KG.bounds", erg.yes, false, true, ""};
    if (erg.yes) {
      cert.bounds = bound_event(nu, cert.fstar, target_lower, target_upper);
      c.holds = cert.bounds->pass;
      if (!c.holds)
        c.detail = "bound event has capacity " + rat_str(cert.bounds->nu_of_event);
    }
    cert.clauses.push_back(c);
  }

  (void)opts;
  cert.all_conclusions_hold = std::all_of(
      cert.clauses.begin(), cert.clauses.end(),
      [](const ClauseResult& c) { return !c.applicable || c.holds; });
  return cert;
}

FeketeResult fekete_limit(const std::vector<Rat>& a, long N, long check_cap) {
  const long len = static_cast<long>(a.size());
  if (len < 1) throw Error("fekete_limit: empty prefix");
  if (N < 0) N = len;
  if (N < 1 || N > len) throw Error("fekete_limit: N out of range");

  FeketeResult out;
  out.verified_pair_cap = std::min(len, check_cap);
  for (long n = 1; n < out.verified_pair_cap && !out.violation; ++n)
    for (long k = 1; n + k <= out.verified_pair_cap; ++k) {
      if (a[static_cast<std::size_t>(n + k - 1)] >
          a[static_cast<std::size_t>(n - 1)] + a[static_cast<std::size_t>(k - 1)]) {
        out.violation = {n, k};
        break;
      }
    }

  out.estimate = a[static_cast<std::size_t>(N - 1)] / Rat(N);
  Rat best = a[0];
  for (long n = 1; n <= len; ++n) {
    Rat v = a[static_cast<std::size_t>(n - 1)] / Rat(n);
    if (n == 1 || v < best) best = v;
  }
  out.gap = out.estimate - best;
  return out;
}

}  // namespace ergocap
