#include "ergocap/capacity.hpp"

#include <algorithm>
#include <bit>

namespace ergocap {

namespace {

int g_pair_scan_cap = kDefaultPairScanCap;

void check_range(const FiniteSpace& space, const std::vector<Rat>& values) {
  if (values.size() != space.event_count())
    throw InvalidSetFunction("set function: expected " +
                             std::to_string(space.event_count()) +
                             " event values, got " + std::to_string(values.size()));
  for (std::uint32_t m = 0; m < values.size(); ++m) {
    const Rat& v = values[m];
    if (v < 0 || v > 1)
      throw InvalidSetFunction("set function: value " + rat_str(v) +
                               " outside [0,1] at event " + Event(m, space.n()).bits());
  }
}

}  // namespace

int pair_scan_cap() { return g_pair_scan_cap; }

void set_pair_scan_cap(int cap) {
  if (cap < 1 || cap > FiniteSpace::kMaxPoints)
    throw Error("set_pair_scan_cap: cap out of range");
  g_pair_scan_cap = cap;
}

FlagReport classify(const FiniteSpace& space, const std::vector<Rat>& values,
                    int pair_scan_cap) {
  check_range(space, values);
  if (pair_scan_cap < 0) pair_scan_cap = g_pair_scan_cap;
  if (space.n() > pair_scan_cap)
    throw SizeCapExceeded("classify: n=" + std::to_string(space.n()) +
                          " exceeds the pairwise scan cap " +
                          std::to_string(pair_scan_cap));
  FlagReport rep;
  const std::uint32_t full = space.full_mask();

  rep.is_capacity = true;
  if (values[0] != 0) {
    rep.is_capacity = false;
    rep.note = "value at empty event is " + rat_str(values[0]) + ", not 0";
  } else if (values[full] != 1) {
    rep.is_capacity = false;
    rep.note = "value at full event is " + rat_str(values[full]) + ", not 1";
  } else {
    // monotonicity: enough to compare A with A + one point
    for (std::uint32_t a = 0; a <= full && rep.is_capacity; ++a) {
      for (int i = 0; i < space.n(); ++i) {
        if ((a >> i) & 1u) continue;
        std::uint32_t b = a | (1u << i);
        if (values[a] > values[b]) {
          rep.is_capacity = false;
          rep.monotonicity_witness = PairWitness{a, b};
          break;
        }
      }
    }
  }

  rep.is_convex = true;
  rep.is_additive = true;
  for (std::uint32_t a = 0; a <= full; ++a) {
    for (std::uint32_t b = a; b <= full; ++b) {
      const Rat lhs = values[a | b] + values[a & b];
      const Rat rhs = values[a] + values[b];
      if (rep.is_convex && lhs < rhs) {
        rep.is_convex = false;
        rep.convexity_witness = PairWitness{a, b};
      }
      if (rep.is_additive && (a & b) == 0 && values[a | b] != rhs) {
        rep.is_additive = false;
        rep.additivity_witness = PairWitness{a, b};
      }
      if (!rep.is_convex && !rep.is_additive) break;
    }
    if (!rep.is_convex && !rep.is_additive) break;
  }

  if (rep.is_additive && !rep.is_convex)
    throw Error("classify: internal inconsistency, additive but not convex");
  return rep;
}

Capacity Capacity::from_values(FiniteSpace space, std::vector<Rat> values) {
  // capacity axioms only; the quadratic structure flags resolve lazily
  check_range(space, values);
  const std::uint32_t full = space.full_mask();
  if (values[0] != 0)
    throw InvalidSetFunction("not a capacity: value at empty event is " +
                             rat_str(values[0]));
  if (values[full] != 1)
    throw InvalidSetFunction("not a capacity: value at full event is " +
                             rat_str(values[full]));
  for (std::uint32_t a = 0; a <= full; ++a)
    for (int i = 0; i < space.n(); ++i) {
      if ((a >> i) & 1u) continue;
      if (values[a] > values[a | (1u << i)])
        throw InvalidSetFunction("not a capacity: monotonicity fails at A=" +
                                 Event(a, space.n()).bits() + " B=" +
                                 Event(a | (1u << i), space.n()).bits());
    }
  return Capacity(std::move(space), std::move(values));
}

Capacity Capacity::additive_from_masses(FiniteSpace space,
                                        const std::vector<Rat>& masses) {
  if (static_cast<int>(masses.size()) != space.n())
    throw InvalidSetFunction("additive capacity: mass count mismatch");
  std::vector<Rat> values(space.event_count(), Rat(0));
  for (std::uint32_t m = 1; m < space.event_count(); ++m) {
    int low = std::countr_zero(m);
    values[m] = values[m & (m - 1u)] + masses[static_cast<std::size_t>(low)];
  }
  return from_values(std::move(space), std::move(values));
}

Capacity Capacity::vacuous(FiniteSpace space) {
  std::vector<Rat> values(space.event_count(), Rat(0));
  values[space.full_mask()] = 1;
  return from_values(std::move(space), std::move(values));
}

Capacity Capacity::unanimity(FiniteSpace space, std::uint32_t k_mask) {
  if (k_mask == 0 || (k_mask >> space.n()))
    throw InvalidSetFunction("unanimity: focal set must be a nonempty event");
  std::vector<Rat> values(space.event_count(), Rat(0));
  for (std::uint32_t m = 0; m < space.event_count(); ++m)
    if ((m & k_mask) == k_mask) values[m] = 1;
  return from_values(std::move(space), std::move(values));
}

const Rat& Capacity::at(const Event& e) const {
  if (e.n() != space_.n()) throw SpaceMismatch("Capacity::at: event on a different space");
  return values_[e.mask()];
}

bool Capacity::convex(int pair_scan_cap) const {
  if (convex_.load() < 0) {
    FlagReport rep = classify(*this, pair_scan_cap);
    convex_.store(rep.is_convex ? 1 : 0);
    additive_.store(rep.is_additive ? 1 : 0);
  }
  return convex_.load() == 1;
}

bool Capacity::additive(int pair_scan_cap) const {
  if (additive_.load() < 0) {
    FlagReport rep = classify(*this, pair_scan_cap);
    convex_.store(rep.is_convex ? 1 : 0);
    additive_.store(rep.is_additive ? 1 : 0);
  }
  return additive_.load() == 1;
}

bool Capacity::totally_monotone() const {
  if (totally_monotone_.load() < 0)
    totally_monotone_.store(mobius(*this).totally_monotone() ? 1 : 0);
  return totally_monotone_.load() == 1;
}

FlagReport classify(const Capacity& nu, int pair_scan_cap) {
  return classify(nu.space(), nu.values(), pair_scan_cap);
}

Capacity conjugate(const Capacity& nu) {
  const std::uint32_t full = nu.full_mask();
  std::vector<Rat> values(nu.space().event_count());
  for (std::uint32_t m = 0; m <= full; ++m)
    values[m] = Rat(1) - nu.at(full & ~m);
  return Capacity::from_values(nu.space(), std::move(values));
}

bool MobiusTransform::totally_monotone() const {
  return !negative_mass_event().has_value();
}

std::optional<std::uint32_t> MobiusTransform::negative_mass_event() const {
  for (std::uint32_t m = 0; m < mass.size(); ++m)
    if (mass[m] < 0) return m;
  return std::nullopt;
}

MobiusTransform mobius(const Capacity& nu) {
  // inverse zeta transform over the subset lattice, one dimension at a time
  std::vector<Rat> mass = nu.values();
  for (int i = 0; i < nu.n(); ++i) {
    for (std::uint32_t m = 0; m < mass.size(); ++m) {
      if ((m >> i) & 1u) mass[m] -= mass[m ^ (1u << i)];
    }
  }
  return MobiusTransform{nu.space(), std::move(mass)};
}

Capacity capacity_from_mobius(const FiniteSpace& space,
                              const std::vector<Rat>& mass) {
  if (mass.size() != space.event_count())
    throw InvalidSetFunction("capacity_from_mobius: mass count mismatch");
  std::vector<Rat> values = mass;
  for (int i = 0; i < space.n(); ++i) {
    for (std::uint32_t m = 0; m < values.size(); ++m) {
      if ((m >> i) & 1u) values[m] += values[m ^ (1u << i)];
    }
  }
  return Capacity::from_values(space, std::move(values));
}

RealFunction::RealFunction(FiniteSpace s, std::vector<Rat> v)
    : space(std::move(s)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != space.n())
    throw Error("RealFunction: need one value per point");
}

RealFunction RealFunction::constant(const FiniteSpace& s, const Rat& c) {
  return RealFunction(s, std::vector<Rat>(static_cast<std::size_t>(s.n()), c));
}

RealFunction RealFunction::indicator(const Event& e) {
  FiniteSpace s(e.n());
  std::vector<Rat> v(static_cast<std::size_t>(e.n()), Rat(0));
  for (int i = 0; i < e.n(); ++i)
    if (e.contains(i)) v[static_cast<std::size_t>(i)] = 1;
  return RealFunction(s, std::move(v));
}

RealFunction RealFunction::plus_constant(const Rat& c) const {
  std::vector<Rat> v = values;
  for (Rat& x : v) x += c;
  return RealFunction(space, std::move(v));
}

RealFunction RealFunction::negate() const {
  std::vector<Rat> v = values;
  for (Rat& x : v) x = -x;
  return RealFunction(space, std::move(v));
}

RealFunction RealFunction::add(const RealFunction& other) const {
  if (!(space == other.space)) throw SpaceMismatch("RealFunction::add");
  std::vector<Rat> v = values;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values[i];
  return RealFunction(space, std::move(v));
}

Rat RealFunction::max_abs() const {
  Rat out(0);
  for (const Rat& x : values) out = std::max(out, rat_abs(x));
  return out;
}

bool comonotone(const RealFunction& f, const RealFunction& g) {
  if (!(f.space == g.space)) throw SpaceMismatch("comonotone");
  const int n = f.space.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int sf = cmp(f.at(i), f.at(j));
      int sg = cmp(g.at(i), g.at(j));
      if (sf * sg < 0) return false;
    }
  return true;
}

std::uint32_t upper_level_set(const RealFunction& f, const Rat& threshold) {
  std::uint32_t mask = 0;
  for (int i = 0; i < f.space.n(); ++i)
    if (f.at(i) >= threshold) mask |= (1u << i);
  return mask;
}

Rat choquet(const Capacity& nu, const RealFunction& f) {
  if (!(nu.space() == f.space)) throw SpaceMismatch("choquet: capacity and function on different spaces");
  std::vector<Rat> levels = f.values;
  std::sort(levels.begin(), levels.end(), [](const Rat& a, const Rat& b) { return a > b; });
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  Rat out = levels.back();  // v_m * nu(full) with nu(full) = 1
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    std::uint32_t a = upper_level_set(f, levels[i]);
    out += (levels[i] - levels[i + 1]) * nu.at(a);
  }
  return out;
}

Rat choquet_upper(const Capacity& nu, const RealFunction& f) {
  return choquet(conjugate(nu), f);
}

}  // namespace ergocap
