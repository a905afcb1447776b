#include "ergocap/dynamics.hpp"

#include <algorithm>
#include <numeric>

namespace ergocap {

FiniteMap FiniteMap::from_table(FiniteSpace space, std::vector<int> table) {
  if (static_cast<int>(table.size()) != space.n())
    throw Error("FiniteMap: table must cover every point");
  for (int img : table)
    if (img < 0 || img >= space.n())
      throw Error("FiniteMap: image " + std::to_string(img) + " out of range");
  return FiniteMap(std::move(space), std::move(table));
}

FiniteMap FiniteMap::identity(FiniteSpace space) {
  std::vector<int> table(static_cast<std::size_t>(space.n()));
  std::iota(table.begin(), table.end(), 0);
  return from_table(std::move(space), std::move(table));
}

std::uint32_t FiniteMap::preimage(std::uint32_t event_mask) const {
  std::uint32_t out = 0;
  for (int u = 0; u < n(); ++u)
    if ((event_mask >> apply(u)) & 1u) out |= (1u << u);
  return out;
}

std::uint32_t FiniteMap::preimage_k(std::uint32_t event_mask, int k) const {
  std::uint32_t out = event_mask;
  for (int i = 0; i < k; ++i) out = preimage(out);
  return out;
}

int FiniteMap::iterate(int point, int k) const {
  int p = point;
  for (int i = 0; i < k; ++i) p = apply(p);
  return p;
}

int CycleDecomposition::cycle_lcm() const {
  long l = 1;
  for (const auto& c : components)
    l = std::lcm(l, static_cast<long>(c.cycle.size()));
  return static_cast<int>(l);
}

int CycleDecomposition::max_preperiod() const {
  return *std::max_element(preperiod.begin(), preperiod.end());
}

CycleDecomposition decompose(const FiniteMap& tau) {
  const int n = tau.n();
  // weak components: union-find over the edges u -> tau(u)
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int u = 0; u < n; ++u) {
    int a = find(u), b = find(tau.apply(u));
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

  // locate cycle points: iterate n steps from anywhere lands on a cycle
  std::vector<bool> on_cycle(static_cast<std::size_t>(n), false);
  for (int u = 0; u < n; ++u) on_cycle[static_cast<std::size_t>(tau.iterate(u, n))] = true;

  CycleDecomposition dec;
  dec.component_of.assign(static_cast<std::size_t>(n), -1);
  dec.preperiod.assign(static_cast<std::size_t>(n), 0);

  std::vector<int> roots;
  for (int u = 0; u < n; ++u)
    if (find(u) == u) roots.push_back(u);
  std::sort(roots.begin(), roots.end());

  for (int root : roots) {
    CycleDecomposition::Component comp;
    for (int u = 0; u < n; ++u)
      if (find(u) == root) {
        comp.points.push_back(u);
        comp.point_mask |= (1u << u);
      }
    int cycle_min = -1;
    for (int u : comp.points)
      if (on_cycle[static_cast<std::size_t>(u)] && cycle_min < 0) cycle_min = u;
    // walk the cycle starting at its smallest point
    int p = cycle_min;
    do {
      comp.cycle.push_back(p);
      comp.cycle_mask |= (1u << p);
      p = tau.apply(p);
    } while (p != cycle_min);
    int idx = static_cast<int>(dec.components.size());
    for (int u : comp.points) dec.component_of[static_cast<std::size_t>(u)] = idx;
    dec.components.push_back(std::move(comp));
  }

  for (int u = 0; u < n; ++u) {
    int steps = 0, p = u;
    while (!on_cycle[static_cast<std::size_t>(p)]) {
      p = tau.apply(p);
      ++steps;
    }
    dec.preperiod[static_cast<std::size_t>(u)] = steps;
  }
  return dec;
}

InvariantEventLattice::InvariantEventLattice(const CycleDecomposition& dec, int n)
    : n_(n) {
  for (const auto& c : dec.components) blocks_.push_back(c.point_mask);
}

bool InvariantEventLattice::contains(std::uint32_t event_mask) const {
  std::uint32_t covered = 0;
  for (std::uint32_t b : blocks_) {
    if (event_mask & b) {
      if ((event_mask & b) != b) return false;  // cuts a component
      covered |= b;
    }
  }
  return covered == event_mask;
}

std::vector<std::uint32_t> InvariantEventLattice::all_events() const {
  const std::size_t k = blocks_.size();
  std::vector<std::uint32_t> out;
  out.reserve(1u << k);
  for (std::uint32_t s = 0; s < (1u << k); ++s) {
    std::uint32_t e = 0;
    for (std::size_t i = 0; i < k; ++i)
      if ((s >> i) & 1u) e |= blocks_[i];
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

InvariantEventLattice invariant_events(const FiniteMap& tau) {
  return InvariantEventLattice(decompose(tau), tau.n());
}

std::vector<std::uint32_t> invariant_events_bruteforce(const FiniteMap& tau,
                                                       int scan_cap) {
  if (tau.n() > scan_cap)
    throw SizeCapExceeded("invariant_events_bruteforce: n exceeds scan cap");
  std::vector<std::uint32_t> out;
  for (std::uint32_t e = 0; e <= tau.space().full_mask(); ++e)
    if (tau.preimage(e) == e) out.push_back(e);
  return out;
}

InvariantMeasureFamily ergodic_measures(const FiniteMap& tau) {
  CycleDecomposition dec = decompose(tau);
  InvariantMeasureFamily fam;
  for (const auto& c : dec.components)
    fam.ergodic.push_back(ProbabilityWeights::uniform(tau.space(), c.cycle_mask));
  return fam;
}

bool is_invariant_measure(const ProbabilityWeights& p, const FiniteMap& tau) {
  if (!(p.space() == tau.space())) throw SpaceMismatch("is_invariant_measure");
  for (int w = 0; w < tau.n(); ++w) {
    Rat inflow(0);
    for (int u = 0; u < tau.n(); ++u)
      if (tau.apply(u) == w) inflow += p.mass(u);
    if (inflow != p.mass(w)) return false;
  }
  return true;
}

ProbabilityWeights pushforward_measure(const FiniteMap& tau, const ProbabilityWeights& p) {
  std::vector<Rat> masses(static_cast<std::size_t>(tau.n()), Rat(0));
  for (int u = 0; u < tau.n(); ++u)
    masses[static_cast<std::size_t>(tau.apply(u))] += p.mass(u);
  return ProbabilityWeights::from_masses(tau.space(), std::move(masses));
}

RealFunction birkhoff_limit(const FiniteMap& tau, const RealFunction& f) {
  if (!(tau.space() == f.space)) throw SpaceMismatch("birkhoff_limit");
  CycleDecomposition dec = decompose(tau);
  std::vector<Rat> cycle_mean(dec.components.size());
  for (std::size_t i = 0; i < dec.components.size(); ++i) {
    Rat total(0);
    for (int p : dec.components[i].cycle) total += f.at(p);
    cycle_mean[i] = total / Rat(static_cast<long>(dec.components[i].cycle.size()));
  }
  std::vector<Rat> out(static_cast<std::size_t>(tau.n()));
  for (int p = 0; p < tau.n(); ++p)
    out[static_cast<std::size_t>(p)] =
        cycle_mean[static_cast<std::size_t>(dec.component_of[static_cast<std::size_t>(p)])];
  return RealFunction(tau.space(), std::move(out));
}

Rat time_average(const FiniteMap& tau, const RealFunction& f, int point, int n) {
  if (n < 1) throw Error("time_average: n must be positive");
  Rat total(0);
  int p = point;
  for (int k = 0; k < n; ++k) {
    total += f.at(p);
    p = tau.apply(p);
  }
  return total / Rat(n);
}

Rat birkhoff_error_bound(const FiniteMap& tau, const RealFunction& f, int point, int n) {
  CycleDecomposition dec = decompose(tau);
  Rat lambda = f.max_abs();
  int pre = dec.preperiod[static_cast<std::size_t>(point)];
  auto cycle_len = static_cast<long>(
      dec.components[static_cast<std::size_t>(dec.component_of[static_cast<std::size_t>(point)])]
          .cycle.size());
  return (Rat(2) * lambda * Rat(pre) + Rat(2) * lambda * Rat(cycle_len - 1)) / Rat(n);
}

CycleKernel cycle_kernel(const FiniteMap& tau) {
  CycleDecomposition dec = decompose(tau);
  CycleKernel kernel;
  kernel.at.reserve(static_cast<std::size_t>(tau.n()));
  for (int p = 0; p < tau.n(); ++p) {
    const auto& comp =
        dec.components[static_cast<std::size_t>(dec.component_of[static_cast<std::size_t>(p)])];
    kernel.at.push_back(ProbabilityWeights::uniform(tau.space(), comp.cycle_mask));
  }
  return kernel;
}

RealFunction conditional_expectation(const FiniteMap& tau, const RealFunction& f) {
  CycleKernel kernel = cycle_kernel(tau);
  std::vector<Rat> out(static_cast<std::size_t>(tau.n()));
  for (int p = 0; p < tau.n(); ++p)
    out[static_cast<std::size_t>(p)] = kernel.at[static_cast<std::size_t>(p)].expectation(f);
  RealFunction g(tau.space(), std::move(out));
  if (!(g == birkhoff_limit(tau, f)))
    throw Error("conditional_expectation: kernel route disagrees with the orbit route");
  return g;
}

ProbabilityWeights cesaro(const ProbabilityWeights& p, const FiniteMap& tau, int n) {
  if (n < 1) throw Error("cesaro: n must be positive");
  std::vector<Rat> total(static_cast<std::size_t>(tau.n()), Rat(0));
  ProbabilityWeights current = p;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < tau.n(); ++i) total[static_cast<std::size_t>(i)] += current.mass(i);
    if (k + 1 < n) current = pushforward_measure(tau, current);
  }
  for (Rat& t : total) t /= n;
  return ProbabilityWeights::from_masses(tau.space(), std::move(total));
}

InvariantWitness invariant_witness(const ProbabilityWeights& p, const FiniteMap& tau) {
  if (!(p.space() == tau.space())) throw SpaceMismatch("invariant_witness");
  CycleDecomposition dec = decompose(tau);

  std::vector<Rat> masses(static_cast<std::size_t>(tau.n()), Rat(0));
  for (const auto& comp : dec.components) {
    Rat comp_mass = p.of(comp.point_mask);
    if (comp_mass == 0) continue;
    Rat share = comp_mass / Rat(static_cast<long>(comp.cycle.size()));
    for (int q : comp.cycle) masses[static_cast<std::size_t>(q)] += share;
  }
  InvariantWitness w{ProbabilityWeights::from_masses(tau.space(), std::move(masses)),
                     0, 1, false, false, false};

  // smallest period of the orbit measure sequence, then smallest onset
  auto orbit_measure = [&](int k) {
    ProbabilityWeights q = p;
    for (int i = 0; i < k; ++i) q = pushforward_measure(tau, q);
    return q;
  };
  const int pre_max = dec.max_preperiod();
  const int big_l = dec.cycle_lcm();
  ProbabilityWeights settled = orbit_measure(pre_max);
  int period = big_l;
  for (int d = 1; d <= big_l; ++d) {
    if (big_l % d != 0) continue;
    ProbabilityWeights shifted = settled;
    for (int i = 0; i < d; ++i) shifted = pushforward_measure(tau, shifted);
    if (shifted == settled) {
      period = d;
      break;
    }
  }
  int n0 = pre_max;
  for (int m = 0; m < pre_max; ++m) {
    ProbabilityWeights q = orbit_measure(m);
    ProbabilityWeights shifted = q;
    for (int i = 0; i < period; ++i) shifted = pushforward_measure(tau, shifted);
    if (shifted == q) {
      n0 = m;
      break;
    }
  }
  w.n0 = n0;
  w.period = period;

  w.limit_invariant = is_invariant_measure(w.limit, tau);

  InvariantEventLattice lattice(dec, tau.n());
  w.lattice_agreement = true;
  for (std::uint32_t e : lattice.all_events())
    if (p.of(e) != w.limit.of(e)) {
      w.lattice_agreement = false;
      break;
    }

  // exact recurrence: P_{n+L} = (n P_n + L limit) / (n + L) for n >= n0
  w.recurrence_verified = true;
  for (int n = std::max(n0, 1); n <= std::max(n0, 1) + period; ++n) {
    ProbabilityWeights lhs = cesaro(p, tau, n + period);
    ProbabilityWeights pn = cesaro(p, tau, n);
    std::vector<Rat> rhs(static_cast<std::size_t>(tau.n()));
    for (int i = 0; i < tau.n(); ++i)
      rhs[static_cast<std::size_t>(i)] =
          (Rat(n) * pn.mass(i) + Rat(period) * w.limit.mass(i)) / Rat(n + period);
    if (!(lhs == ProbabilityWeights::from_masses(tau.space(), std::move(rhs)))) {
      w.recurrence_verified = false;
      break;
    }
  }
  return w;
}

PotentialInvarianceVerdict is_potentially_invariant(const ProbabilityWeights& p,
                                                    const FiniteMap& tau) {
  PotentialInvarianceVerdict v{false, invariant_witness(p, tau)};
  v.yes = v.witness.limit_invariant && v.witness.lattice_agreement;
  return v;
}

}  // namespace ergocap
