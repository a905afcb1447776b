#include "ergocap/credal.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace ergocap {

ProbabilityWeights ProbabilityWeights::from_masses(FiniteSpace space,
                                                   std::vector<Rat> masses) {
  if (static_cast<int>(masses.size()) != space.n())
    throw InvalidSetFunction("ProbabilityWeights: mass count mismatch");
  Rat total(0);
  for (const Rat& m : masses) {
    if (m < 0) throw InvalidSetFunction("ProbabilityWeights: negative mass " + rat_str(m));
    total += m;
  }
  if (total != 1)
    throw InvalidSetFunction("ProbabilityWeights: masses sum to " + rat_str(total) + ", not 1");
  return ProbabilityWeights(std::move(space), std::move(masses));
}

ProbabilityWeights ProbabilityWeights::uniform(FiniteSpace space,
                                               std::uint32_t support_mask) {
  int k = std::popcount(support_mask);
  if (k == 0) throw InvalidSetFunction("uniform: empty support");
  std::vector<Rat> masses(static_cast<std::size_t>(space.n()), Rat(0));
  for (int i = 0; i < space.n(); ++i)
    if ((support_mask >> i) & 1u) masses[static_cast<std::size_t>(i)] = rat(1, k);
  return from_masses(std::move(space), std::move(masses));
}

ProbabilityWeights ProbabilityWeights::dirac(FiniteSpace space, int point) {
  std::vector<Rat> masses(static_cast<std::size_t>(space.n()), Rat(0));
  masses.at(static_cast<std::size_t>(point)) = 1;
  return from_masses(std::move(space), std::move(masses));
}

Rat ProbabilityWeights::of(std::uint32_t event_mask) const {
  Rat out(0);
  for (int i = 0; i < space_.n(); ++i)
    if ((event_mask >> i) & 1u) out += masses_[static_cast<std::size_t>(i)];
  return out;
}

Rat ProbabilityWeights::of(const Event& e) const {
  if (e.n() != space_.n()) throw SpaceMismatch("ProbabilityWeights::of");
  return of(e.mask());
}

Rat ProbabilityWeights::expectation(const RealFunction& f) const {
  if (!(f.space == space_)) throw SpaceMismatch("ProbabilityWeights::expectation");
  Rat out(0);
  for (int i = 0; i < space_.n(); ++i)
    out += masses_[static_cast<std::size_t>(i)] * f.at(i);
  return out;
}

Capacity ProbabilityWeights::as_capacity() const {
  return Capacity::additive_from_masses(space_, masses_);
}

bool operator<(const ProbabilityWeights& a, const ProbabilityWeights& b) {
  return std::lexicographical_compare(
      a.masses_.begin(), a.masses_.end(), b.masses_.begin(), b.masses_.end(),
      [](const Rat& x, const Rat& y) { return x < y; });
}

CredalSet::CredalSet(std::vector<ProbabilityWeights> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error("CredalSet: must be nonempty");
  for (const auto& p : members_)
    if (!(p.space() == members_.front().space()))
      throw SpaceMismatch("CredalSet: members on different spaces");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

Capacity lower_envelope(const CredalSet& m) {
  const FiniteSpace& space = m.space();
  std::vector<Rat> values(space.event_count());
  for (std::uint32_t e = 0; e < space.event_count(); ++e) {
    Rat best = m.member(0).of(e);
    for (std::size_t i = 1; i < m.size(); ++i) best = std::min(best, m.member(i).of(e));
    values[e] = best;
  }
  return Capacity::from_values(space, std::move(values));
}

Capacity upper_envelope(const CredalSet& m) {
  const FiniteSpace& space = m.space();
  std::vector<Rat> values(space.event_count());
  for (std::uint32_t e = 0; e < space.event_count(); ++e) {
    Rat best = m.member(0).of(e);
    for (std::size_t i = 1; i < m.size(); ++i) best = std::max(best, m.member(i).of(e));
    values[e] = best;
  }
  return Capacity::from_values(space, std::move(values));
}

Rat CorePolytope::min_over(std::uint32_t event_mask) const {
  if (vertices.empty()) throw Error("CorePolytope: empty core has no minimum");
  Rat best = vertices.front().of(event_mask);
  for (std::size_t i = 1; i < vertices.size(); ++i)
    best = std::min(best, vertices[i].of(event_mask));
  return best;
}

Rat CorePolytope::max_over(std::uint32_t event_mask) const {
  if (vertices.empty()) throw Error("CorePolytope: empty core has no maximum");
  Rat best = vertices.front().of(event_mask);
  for (std::size_t i = 1; i < vertices.size(); ++i)
    best = std::max(best, vertices[i].of(event_mask));
  return best;
}

Rat CorePolytope::min_expectation(const RealFunction& f) const {
  if (vertices.empty()) throw Error("CorePolytope: empty core");
  Rat best = vertices.front().expectation(f);
  for (std::size_t i = 1; i < vertices.size(); ++i)
    best = std::min(best, vertices[i].expectation(f));
  return best;
}

Rat CorePolytope::max_expectation(const RealFunction& f) const {
  if (vertices.empty()) throw Error("CorePolytope: empty core");
  Rat best = vertices.front().expectation(f);
  for (std::size_t i = 1; i < vertices.size(); ++i)
    best = std::max(best, vertices[i].expectation(f));
  return best;
}

ProbabilityWeights marginal_vector(const Capacity& nu, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != nu.n())
    throw Error("marginal_vector: order must list every point once");
  std::vector<Rat> masses(static_cast<std::size_t>(nu.n()), Rat(0));
  std::uint32_t prefix = 0;
  for (int p : order) {
    std::uint32_t next = prefix | (1u << p);
    masses[static_cast<std::size_t>(p)] = nu.at(next) - nu.at(prefix);
    prefix = next;
  }
  return ProbabilityWeights::from_masses(nu.space(), std::move(masses));
}

namespace {

// Gaussian elimination over exact rationals.
// Returns the rank; when rhs != nullptr and the system is uniquely solvable,
// writes the solution into *rhs-owned output.
int rational_rank(std::vector<std::vector<Rat>> m) {
  const std::size_t rows = m.size();
  if (rows == 0) return 0;
  const std::size_t cols = m[0].size();
  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[row], m[pivot]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      if (m[r][col] == 0) continue;
      Rat factor = m[r][col] / m[row][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= factor * m[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

// Solves the square system a x = b exactly; nullopt when singular.
std::optional<std::vector<Rat>> solve_square(std::vector<std::vector<Rat>> a,
                                             std::vector<Rat> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rat factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<Rat> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct Constraint {
  std::uint32_t coeff_mask;  // sum over points in the mask
  Rat rhs;
};

// Active-constraint rank test: a feasible point is a vertex iff the
// constraints tight at it span the whole space together with sum x = 1.
bool is_polytope_vertex(const Capacity& nu, const ProbabilityWeights& p) {
  const int n = nu.n();
  std::vector<std::vector<Rat>> rows;
  rows.push_back(std::vector<Rat>(static_cast<std::size_t>(n), Rat(1)));
  for (int i = 0; i < n; ++i) {
    if (p.mass(i) == 0) {
      std::vector<Rat> row(static_cast<std::size_t>(n), Rat(0));
      row[static_cast<std::size_t>(i)] = 1;
      rows.push_back(std::move(row));
    }
  }
  for (std::uint32_t e = 1; e < nu.full_mask(); ++e) {
    if (p.of(e) == nu.at(e)) {
      std::vector<Rat> row(static_cast<std::size_t>(n), Rat(0));
      for (int i = 0; i < n; ++i)
        if ((e >> i) & 1u) row[static_cast<std::size_t>(i)] = 1;
      rows.push_back(std::move(row));
    }
  }
  return rational_rank(std::move(rows)) == n;
}

std::vector<ProbabilityWeights> dedup_sorted(std::vector<ProbabilityWeights> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

CorePolytope core_marginal(const Capacity& nu, const CoreOptions& opts) {
  if (nu.n() > opts.max_n_marginal)
    throw SizeCapExceeded("core_marginal: n=" + std::to_string(nu.n()) +
                          " exceeds cap " + std::to_string(opts.max_n_marginal));
  if (!nu.convex())
    throw HypothesisFailure("core_marginal: capacity is not convex");
  std::vector<int> order(static_cast<std::size_t>(nu.n()));
  std::iota(order.begin(), order.end(), 0);
  std::vector<ProbabilityWeights> vertices;
  do {
    vertices.push_back(marginal_vector(nu, order));
  } while (std::next_permutation(order.begin(), order.end()));
  vertices = dedup_sorted(std::move(vertices));

  // For convex capacities every marginal vector is an extreme point; the
  // rank filter certifies that rather than assuming it.
  std::vector<ProbabilityWeights> extreme;
  extreme.reserve(vertices.size());
  for (auto& v : vertices)
    if (is_polytope_vertex(nu, v)) extreme.push_back(std::move(v));

  CorePolytope out{nu.space(), std::move(extreme), CoreProvenance::MarginalHull, false};
  out.empty = out.vertices.empty();
  return out;
}

CorePolytope core_enumerate(const Capacity& nu, const CoreOptions& opts) {
  const int n = nu.n();
  if (n > opts.max_n_general)
    throw SizeCapExceeded("core_enumerate: n=" + std::to_string(n) +
                          " exceeds cap " + std::to_string(opts.max_n_general));

  // Inequality description, deduplicated by coefficient row. Events with
  // value 0 are implied by nonnegativity and contribute no new vertices.
  std::vector<Constraint> cons;
  for (int i = 0; i < n; ++i) cons.push_back({1u << i, Rat(0)});
  for (std::uint32_t e = 1; e < nu.full_mask(); ++e) {
    if (std::popcount(e) == 1) {
      if (nu.at(e) > 0) cons[static_cast<std::size_t>(std::countr_zero(e))].rhs = nu.at(e);
      continue;
    }
    if (nu.at(e) > 0) cons.push_back({e, nu.at(e)});
  }

  auto feasible = [&](const ProbabilityWeights& p) {
    for (int i = 0; i < n; ++i)
      if (p.mass(i) < 0) return false;
    for (std::uint32_t e = 1; e < nu.full_mask(); ++e)
      if (p.of(e) < nu.at(e)) return false;
    return true;
  };

  std::vector<ProbabilityWeights> vertices;
  // choose n-1 constraints to be tight alongside sum x = 1
  const std::size_t m = cons.size();
  std::vector<std::size_t> pick(static_cast<std::size_t>(n - 1));
  auto try_basis = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    a.push_back(std::vector<Rat>(static_cast<std::size_t>(n), Rat(1)));
    b.push_back(Rat(1));
    for (std::size_t k : idx) {
      std::vector<Rat> row(static_cast<std::size_t>(n), Rat(0));
      for (int i = 0; i < n; ++i)
        if ((cons[k].coeff_mask >> i) & 1u) row[static_cast<std::size_t>(i)] = 1;
      a.push_back(std::move(row));
      b.push_back(cons[k].rhs);
    }
    auto x = solve_square(std::move(a), std::move(b));
    if (!x) return;
    for (const Rat& xi : *x)
      if (xi < 0) return;
    Rat total(0);
    for (const Rat& xi : *x) total += xi;
    if (total != 1) return;
    auto p = ProbabilityWeights::from_masses(nu.space(), std::move(*x));
    if (feasible(p)) vertices.push_back(std::move(p));
  };

  if (n == 1) {
    auto p = ProbabilityWeights::dirac(nu.space(), 0);
    if (feasible(p)) vertices.push_back(std::move(p));
  } else {
    // lexicographic subsets of size n-1
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      try_basis(pick);
      // advance
      int i = n - 2;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] ==
                           m - static_cast<std::size_t>(n - 1 - i))
        --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < pick.size(); ++j)
        pick[j] = pick[j - 1] + 1;
    }
  }

  vertices = dedup_sorted(std::move(vertices));
  CorePolytope out{nu.space(), std::move(vertices), CoreProvenance::GeneralEnumeration, false};
  out.empty = out.vertices.empty();
  return out;
}

CorePolytope core(const Capacity& nu, const CoreOptions& opts) {
  if (nu.n() <= opts.max_n_marginal && nu.convex()) return core_marginal(nu, opts);
  return core_enumerate(nu, opts);
}

ExactnessVerdict is_exact(const Capacity& nu, const CoreOptions& opts) {
  ExactnessVerdict v{false, false, std::nullopt, Rat(0), core(nu, opts)};
  if (v.core.empty) {
    v.core_empty = true;
    v.exact = false;
    return v;
  }
  for (std::uint32_t e = 0; e <= nu.full_mask(); ++e) {
    Rat achieved = v.core.min_over(e);
    if (achieved != nu.at(e)) {
      v.exact = false;
      v.witness_event = e;
      v.achieved_minimum = achieved;
      return v;
    }
  }
  v.exact = true;
  return v;
}

Capacity predictive(const Prior& rho, const CredalSet& family) {
  if (rho.n() != static_cast<int>(family.size()))
    throw SpaceMismatch("predictive: prior space size differs from family size");
  const FiniteSpace& base = family.space();
  std::vector<Rat> values(base.event_count());
  for (std::uint32_t e = 0; e < base.event_count(); ++e) {
    std::vector<Rat> eval(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) eval[i] = family.member(i).of(e);
    values[e] = choquet(rho, RealFunction(rho.space(), std::move(eval)));
  }
  return Capacity::from_values(base, std::move(values));
}

ProbabilityWeights mixture(const ProbabilityWeights& pi, const CredalSet& family) {
  if (pi.space().n() != static_cast<int>(family.size()))
    throw SpaceMismatch("mixture: weight space size differs from family size");
  const FiniteSpace& base = family.space();
  std::vector<Rat> masses(static_cast<std::size_t>(base.n()), Rat(0));
  for (std::size_t i = 0; i < family.size(); ++i) {
    const Rat& w = pi.mass(static_cast<int>(i));
    if (w == 0) continue;
    for (int p = 0; p < base.n(); ++p)
      masses[static_cast<std::size_t>(p)] += w * family.member(i).mass(p);
  }
  return ProbabilityWeights::from_masses(base, std::move(masses));
}

CredalSet lower_probability_decomposition(const Prior& rho, const CredalSet& family,
                                          const CoreOptions& opts) {
  if (!rho.convex())
    throw HypothesisFailure("lower_probability_decomposition: prior is not convex");
  CorePolytope rho_core = core_marginal(rho, opts);
  std::vector<ProbabilityWeights> members;
  members.reserve(rho_core.vertices.size());
  for (const auto& pi : rho_core.vertices) members.push_back(mixture(pi, family));
  CredalSet out(std::move(members));

  Capacity env = lower_envelope(out);
  Capacity pred = predictive(rho, family);
  if (!(env == pred))
    throw Error("lower_probability_decomposition: envelope does not reproduce the predictive");
  return out;
}

}  // namespace ergocap
