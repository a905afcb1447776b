#include "ergocap/process.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include <json.hpp>

#include "ergocap/io.hpp"
#include "ergocap/rng.hpp"

namespace ergocap {

bool MarkovMeasure::start_is_stationary() const {
  const std::size_t k = rows.size();
  for (std::size_t j = 0; j < k; ++j) {
    Rat inflow(0);
    for (std::size_t i = 0; i < k; ++i) inflow += start[i] * rows[i][j];
    if (inflow != start[j]) return false;
  }
  return true;
}

bool MarkovMeasure::irreducible() const {
  const std::size_t k = rows.size();
  auto reach = [&](std::size_t from, bool forward) {
    std::vector<bool> seen(k, false);
    std::queue<std::size_t> q;
    q.push(from);
    seen[from] = true;
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (std::size_t v = 0; v < k; ++v) {
        bool edge = forward ? rows[u][v] > 0 : rows[v][u] > 0;
        if (edge && !seen[v]) {
          seen[v] = true;
          q.push(v);
        }
      }
    }
    return seen;
  };
  auto fwd = reach(0, true);
  auto bwd = reach(0, false);
  for (std::size_t i = 0; i < k; ++i)
    if (!fwd[i] || !bwd[i]) return false;
  return true;
}

bool MarkovMeasure::aperiodic() const {
  // gcd of (level[u] + 1 - level[v]) over positive edges, BFS from state 0
  const std::size_t k = rows.size();
  std::vector<int> level(k, -1);
  std::queue<std::size_t> q;
  q.push(0);
  level[0] = 0;
  long g = 0;
  while (!q.empty()) {
    std::size_t u = q.front();
    q.pop();
    for (std::size_t v = 0; v < k; ++v) {
      if (!(rows[u][v] > 0)) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      } else {
        g = std::gcd(g, static_cast<long>(level[u] + 1 - level[v]));
      }
    }
  }
  return std::abs(g) == 1;
}

Rat Distortion::operator()(const Rat& t) const {
  for (const Piece& piece : pieces) {
    if (t < piece.lo || t > piece.hi) continue;
    Rat acc(0);
    for (auto it = piece.coeffs.rbegin(); it != piece.coeffs.rend(); ++it)
      acc = acc * t + *it;
    return acc;
  }
  throw Error("Distortion: argument " + rat_str(t) + " outside [0,1] pieces");
}

Distortion Distortion::power(unsigned k) {
  Distortion g;
  Distortion::Piece piece;
  piece.lo = 0;
  piece.hi = 1;
  piece.coeffs.assign(k + 1, Rat(0));
  piece.coeffs[k] = 1;
  g.pieces.push_back(std::move(piece));
  g.convex_declared = (k >= 1);
  return g;
}

bool ProcessModel::transform_convex_declared() const {
  if (const auto* d = std::get_if<TransformDistortion>(&transform))
    return d->g.convex_declared;
  // contaminations are convex capacities; envelopes are not in general
  return std::holds_alternative<TransformEpsContamination>(transform);
}

void ProcessModel::validate() const {
  if (alphabet.empty()) throw Error("model: empty alphabet");
  if (measures.empty()) throw Error("model: no base measures");
  const std::size_t a = alphabet.size();
  for (const BaseMeasure& bm : measures) {
    if (const auto* iid = std::get_if<IidMeasure>(&bm)) {
      if (iid->weights.size() != a) throw Error("model: iid weight count mismatch");
      Rat total(0);
      for (const Rat& w : iid->weights) {
        if (w < 0) throw Error("model: negative iid weight");
        total += w;
      }
      if (total != 1) throw Error("model: iid weights sum to " + rat_str(total));
    } else {
      const auto& mk = std::get<MarkovMeasure>(bm);
      if (mk.rows.size() != a || mk.start.size() != a)
        throw Error("model: markov dimension mismatch");
      for (const auto& row : mk.rows) {
        if (row.size() != a) throw Error("model: markov row length mismatch");
        Rat total(0);
        for (const Rat& w : row) {
          if (w < 0) throw Error("model: negative transition weight");
          total += w;
        }
        if (total != 1) throw Error("model: markov row sums to " + rat_str(total));
      }
      Rat total(0);
      for (const Rat& w : mk.start) {
        if (w < 0) throw Error("model: negative start weight");
        total += w;
      }
      if (total != 1) throw Error("model: start weights sum to " + rat_str(total));
      // an off-stationary start is well-formed; the stationarity check
      // reports it with a witness window
    }
  }
  if (const auto* d = std::get_if<TransformDistortion>(&transform)) {
    if (d->measure_index >= measures.size())
      throw Error("model: distortion refers to a missing measure");
    if (d->g(Rat(0)) != 0 || d->g(Rat(1)) != 1)
      throw Error("model: distortion endpoints must be g(0)=0, g(1)=1");
  } else if (const auto* e = std::get_if<TransformEpsContamination>(&transform)) {
    if (e->measure_index >= measures.size())
      throw Error("model: contamination refers to a missing measure");
    if (e->eps <= 0 || e->eps >= 1)
      throw Error("model: contamination weight must lie strictly inside (0,1)");
  }
}

CylinderEvent CylinderEvent::full(const ProcessModel& model, int depth) {
  CylinderEvent c;
  c.depth = depth;
  std::uint32_t count = 1;
  for (int i = 0; i < depth; ++i) count *= static_cast<std::uint32_t>(model.symbol_count());
  c.words.resize(count);
  std::iota(c.words.begin(), c.words.end(), 0u);
  return c;
}

namespace {

std::vector<int> decode_word(std::uint32_t word, int depth, std::size_t alphabet) {
  std::vector<int> out(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(word % alphabet);
    word /= static_cast<std::uint32_t>(alphabet);
  }
  return out;
}

std::vector<Rat> marginal_at_offset(const MarkovMeasure& mk, int offset) {
  std::vector<Rat> dist = mk.start;
  for (int step = 1; step < offset; ++step) {
    std::vector<Rat> next(dist.size(), Rat(0));
    for (std::size_t i = 0; i < dist.size(); ++i)
      for (std::size_t j = 0; j < dist.size(); ++j) next[j] += dist[i] * mk.rows[i][j];
    dist = std::move(next);
  }
  return dist;
}

}  // namespace

Rat word_probability(const ProcessModel& model, std::size_t measure_index,
                     const std::vector<int>& word, int offset) {
  const BaseMeasure& bm = model.measures.at(measure_index);
  if (const auto* iid = std::get_if<IidMeasure>(&bm)) {
    Rat out(1);
    for (int s : word) out *= iid->weights[static_cast<std::size_t>(s)];
    return out;
  }
  const auto& mk = std::get<MarkovMeasure>(bm);
  std::vector<Rat> first = marginal_at_offset(mk, offset);
  Rat out = first[static_cast<std::size_t>(word.front())];
  for (std::size_t i = 1; i < word.size(); ++i)
    out *= mk.rows[static_cast<std::size_t>(word[i - 1])][static_cast<std::size_t>(word[i])];
  return out;
}

Rat cylinder_probability(const ProcessModel& model, std::size_t measure_index,
                         const CylinderEvent& c, int offset) {
  Rat out(0);
  for (std::uint32_t w : c.words)
    out += word_probability(model, measure_index,
                            decode_word(w, c.depth, model.symbol_count()), offset);
  return out;
}

Rat pushforward(const ProcessModel& model, const CylinderEvent& c, int offset,
                int depth_cap) {
  if (c.depth < 1 || c.depth > depth_cap)
    throw SizeCapExceeded("pushforward: depth " + std::to_string(c.depth) +
                          " outside [1," + std::to_string(depth_cap) + "]");
  if (const auto* d = std::get_if<TransformDistortion>(&model.transform))
    return d->g(cylinder_probability(model, d->measure_index, c, offset));
  if (const auto* e = std::get_if<TransformEpsContamination>(&model.transform)) {
    long all_words = 1;
    for (int i = 0; i < c.depth; ++i) all_words *= static_cast<long>(model.symbol_count());
    if (static_cast<long>(c.words.size()) == all_words) return Rat(1);
    return (Rat(1) - e->eps) * cylinder_probability(model, e->measure_index, c, offset);
  }
  Rat best = cylinder_probability(model, 0, c, offset);
  for (std::size_t j = 1; j < model.measures.size(); ++j)
    best = std::min(best, cylinder_probability(model, j, c, offset));
  return best;
}

Capacity pushforward_algebra(const ProcessModel& model, int depth, int point_cap) {
  long points = 1;
  for (int i = 0; i < depth; ++i) points *= static_cast<long>(model.symbol_count());
  if (points > point_cap)
    throw SizeCapExceeded("pushforward_algebra: " + std::to_string(points) +
                          " words exceed the cap " + std::to_string(point_cap));
  FiniteSpace word_space(static_cast<int>(points));
  std::vector<Rat> values(word_space.event_count());
  for (std::uint32_t e = 0; e < word_space.event_count(); ++e) {
    CylinderEvent c;
    c.depth = depth;
    for (int w = 0; w < static_cast<int>(points); ++w)
      if ((e >> w) & 1u) c.words.push_back(static_cast<std::uint32_t>(w));
    if (c.words.empty()) {
      values[e] = 0;
      continue;
    }
    values[e] = pushforward(model, c, 1, depth);
  }
  return Capacity::from_values(word_space, std::move(values));
}

StationarityVerdict check_stationarity(const ProcessModel& model, int depth,
                                       int n_max, std::uint64_t sample_seed) {
  model.validate();
  StationarityVerdict v;
  for (int w = 1; w <= depth; ++w) {
    long words = 1;
    for (int i = 0; i < w; ++i) words *= static_cast<long>(model.symbol_count());

    auto check_base = [&](const std::vector<std::uint32_t>& base) {
      CylinderEvent c;
      c.depth = w;
      c.words = base;
      for (int n = 1; n <= n_max; ++n) {
        if (pushforward(model, c, n) != pushforward(model, c, n + 1)) {
          v.yes = false;
          v.witness_offset = n;
          v.witness_window = w;
          v.witness_words = base;
          return false;
        }
      }
      return true;
    };

    if (words <= 8) {
      // exhaustive over base sets
      for (std::uint32_t mask = 1; mask < (1u << words); ++mask) {
        std::vector<std::uint32_t> base;
        for (int i = 0; i < words; ++i)
          if ((mask >> i) & 1u) base.push_back(static_cast<std::uint32_t>(i));
        if (!check_base(base)) return v;
      }
    } else {
      // singletons plus seeded random base sets
      for (long i = 0; i < words; ++i)
        if (!check_base({static_cast<std::uint32_t>(i)})) return v;
      Rng rng = Rng::keyed(sample_seed, static_cast<std::uint64_t>(w));
      for (int trial = 0; trial < 256; ++trial) {
        std::vector<std::uint32_t> base;
        for (long i = 0; i < words; ++i)
          if (rng.below(2)) base.push_back(static_cast<std::uint32_t>(i));
        if (base.empty()) base.push_back(static_cast<std::uint32_t>(rng.below(
            static_cast<std::uint64_t>(words))));
        std::sort(base.begin(), base.end());
        base.erase(std::unique(base.begin(), base.end()), base.end());
        if (!check_base(base)) return v;
      }
    }
  }
  return v;
}

ShiftInvarianceVerdict check_shift_invariance(const ProcessModel& model, int depth,
                                              int algebra_point_cap) {
  StationarityVerdict st = check_stationarity(model, depth, 2);
  if (!st.yes)
    throw HypothesisFailure("check_shift_invariance: model not stationary at window " +
                            std::to_string(st.witness_window));

  ShiftInvarianceVerdict v;
  const std::size_t a = model.symbol_count();
  for (int d = 1; d <= depth; ++d) {
    long words = 1;
    for (int i = 0; i < d; ++i) words *= static_cast<long>(a);
    if (words > 16) break;  // exhaustive algebra scan only at desk scale
    for (std::uint32_t mask = 0; mask < (1u << words); ++mask) {
      CylinderEvent c;
      c.depth = d;
      for (int i = 0; i < words; ++i)
        if ((mask >> i) & 1u) c.words.push_back(static_cast<std::uint32_t>(i));
      if (c.words.empty()) continue;

      Rat lhs = pushforward(model, c, 1);
      // shifted cylinder, route one: same base set read at offset 2
      Rat via_offset = pushforward(model, c, 2);
      // route two: depth d+1 cylinder with a free first coordinate
      CylinderEvent lifted;
      lifted.depth = d + 1;
      for (std::uint32_t w : c.words)
        for (std::size_t s = 0; s < a; ++s)
          lifted.words.push_back(static_cast<std::uint32_t>(s) +
                                 static_cast<std::uint32_t>(a) * w);
      std::sort(lifted.words.begin(), lifted.words.end());
      Rat via_lift = pushforward(model, lifted, 1, depth + 1);

      if (lhs != via_offset || lhs != via_lift) {
        v.invariant = false;
        v.invariance_witness = c;
        return v;
      }
    }
  }

  if (model.transform_convex_declared()) {
    Capacity algebra = pushforward_algebra(model, depth, algebra_point_cap);
    FlagReport rep = classify(algebra);
    v.convex_on_algebra = rep.is_convex;
    if (!rep.is_convex) v.convexity_witness = rep.convexity_witness;
  } else if (!model.transform_is_distortion()) {
    // envelopes are not convex in general; report the scan outcome anyway
    long points = 1;
    for (int i = 0; i < depth; ++i) points *= static_cast<long>(a);
    if (points <= algebra_point_cap) {
      Capacity algebra = pushforward_algebra(model, depth, algebra_point_cap);
      FlagReport rep = classify(algebra);
      v.convex_on_algebra = rep.is_convex;
      if (!rep.is_convex) v.convexity_witness = rep.convexity_witness;
    }
  }
  return v;
}

ProcessErgodicityCertificate ergodicity_certificate(const ProcessModel& model) {
  auto measure_tail_trivial = [&](const BaseMeasure& bm) {
    if (std::holds_alternative<IidMeasure>(bm)) return true;
    const auto& mk = std::get<MarkovMeasure>(bm);
    return mk.start_is_stationary() && mk.irreducible() && mk.aperiodic();
  };
  ProcessErgodicityCertificate cert;
  if (const auto* d = std::get_if<TransformDistortion>(&model.transform)) {
    const BaseMeasure& bm = model.measures[d->measure_index];
    if (measure_tail_trivial(bm)) {
      cert.certified = true;
      cert.route = std::holds_alternative<IidMeasure>(bm) ? "distorted-iid" : "distorted-markov";
    } else {
      cert.route = "uncertified";
    }
    return cert;
  }
  if (std::holds_alternative<TransformEpsContamination>(model.transform)) {
    // proper tail events of full base probability receive 1 - eps
    cert.route = "uncertified";
    return cert;
  }
  bool all = std::all_of(model.measures.begin(), model.measures.end(), measure_tail_trivial);
  cert.certified = all;
  cert.route = all ? "credal-ergodic" : "uncertified";
  return cert;
}

namespace {

/// Integer sampling tables: symbol thresholds over a common denominator.
struct SamplerTables {
  // iid: one row; markov: one row per state plus the start row
  std::vector<std::vector<unsigned long>> cumulative;  // exclusive prefix sums
  std::vector<unsigned long> denominators;
  std::vector<unsigned long> start_cumulative;
  unsigned long start_denominator = 1;
  bool markov = false;

  static std::vector<unsigned long> cumulate(const std::vector<Rat>& weights,
                                             unsigned long& denom_out) {
    mpz_class denom(1);
    for (const Rat& w : weights) denom = denom * w.get_den() / gcd(mpz_class(denom), w.get_den());
    if (!denom.fits_ulong_p())
      throw Error("sampler: weight denominators too large for integer sampling");
    unsigned long d = denom.get_ui();
    std::vector<unsigned long> cum;
    unsigned long acc = 0;
    for (const Rat& w : weights) {
      mpz_class num = w.get_num() * (denom / w.get_den());
      acc += num.get_ui();
      cum.push_back(acc);
    }
    denom_out = d;
    return cum;
  }

  static SamplerTables build(const BaseMeasure& bm) {
    SamplerTables t;
    if (const auto* iid = std::get_if<IidMeasure>(&bm)) {
      unsigned long d = 1;
      t.cumulative.push_back(cumulate(iid->weights, d));
      t.denominators.push_back(d);
      return t;
    }
    const auto& mk = std::get<MarkovMeasure>(bm);
    t.markov = true;
    for (const auto& row : mk.rows) {
      unsigned long d = 1;
      t.cumulative.push_back(cumulate(row, d));
      t.denominators.push_back(d);
    }
    t.start_cumulative = cumulate(mk.start, t.start_denominator);
    return t;
  }

  int draw_start(Rng& rng) const {
    if (!markov) return draw_from(rng, cumulative[0], denominators[0]);
    return draw_from(rng, start_cumulative, start_denominator);
  }

  int draw_next(Rng& rng, int state) const {
    if (!markov) return draw_from(rng, cumulative[0], denominators[0]);
    return draw_from(rng, cumulative[static_cast<std::size_t>(state)],
                     denominators[static_cast<std::size_t>(state)]);
  }

  static int draw_from(Rng& rng, const std::vector<unsigned long>& cum,
                       unsigned long denom) {
    unsigned long r = static_cast<unsigned long>(rng.below(denom));
    for (std::size_t s = 0; s < cum.size(); ++s)
      if (r < cum[s]) return static_cast<int>(s);
    return static_cast<int>(cum.size()) - 1;
  }
};

std::vector<long> power_of_two_checkpoints(long horizon) {
  std::vector<long> cps;
  for (long c = 1; c < horizon; c *= 2) cps.push_back(c);
  cps.push_back(horizon);
  return cps;
}

}  // namespace

TrajectoryBatch sample_trajectories(const ProcessModel& model, long horizon, long paths,
                                    std::uint64_t seed) {
  model.validate();
  TrajectoryBatch batch;
  batch.seed = seed;
  batch.checkpoints = power_of_two_checkpoints(horizon);
  // common denominator view of the alphabet values
  mpz_class denom(1);
  for (const Rat& v : model.alphabet)
    denom = denom * v.get_den() / gcd(mpz_class(denom), v.get_den());
  std::vector<long> numer(model.alphabet.size());
  for (std::size_t s = 0; s < model.alphabet.size(); ++s) {
    mpz_class n = model.alphabet[s].get_num() * (denom / model.alphabet[s].get_den());
    numer[s] = n.get_si();
  }
  double denom_d = denom.get_d();

  for (std::size_t mi = 0; mi < model.measures.size(); ++mi) {
    SamplerTables tables = SamplerTables::build(model.measures[mi]);
    for (long path = 0; path < paths; ++path) {
      Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(mi),
                           static_cast<std::uint64_t>(path));
      long long sum = 0;
      int state = tables.draw_start(rng);
      sum += numer[static_cast<std::size_t>(state)];
      std::size_t cp = 0;
      for (long n = 1; n <= horizon; ++n) {
        if (n > 1) {
          state = tables.draw_next(rng, state);
          sum += numer[static_cast<std::size_t>(state)];
        }
        if (cp < batch.checkpoints.size() && n == batch.checkpoints[cp]) {
          batch.rows.push_back({mi, path, n,
                                static_cast<double>(sum) /
                                    (static_cast<double>(n) * denom_d)});
          ++cp;
        }
      }
    }
  }
  return batch;
}

SllnReport slln_experiment(const ProcessModel& model, const SllnParams& params) {
  model.validate();
  SllnReport rep;
  rep.params = params;
  rep.checkpoints = power_of_two_checkpoints(params.horizon);

  StationarityVerdict st = check_stationarity(model, 2, 3);
  rep.stationarity_checked = st.yes;

  rep.ergodicity = ergodicity_certificate(model);
  bool convex_ok = model.transform_convex_declared();
  rep.hypotheses_complete = st.yes && convex_ok && rep.ergodicity.certified;
  if (!st.yes)
    rep.hypothesis_note = "not stationary";
  else if (!convex_ok)
    rep.hypothesis_note = "hypothesis-incomplete: transform not declared convex";
  else if (!rep.ergodicity.certified)
    rep.hypothesis_note = "hypothesis-incomplete: ergodicity uncertified";

  // exact bounds from the first coordinate, via the word algebra
  Capacity depth1 = pushforward_algebra(model, 1, 16);
  RealFunction coord(depth1.space(), model.alphabet);
  rep.lower_bound = choquet(depth1, coord);
  rep.upper_bound = choquet_upper(depth1, coord);

  // distortion models admit a second route: compose g with the base
  // probabilities inside the Choquet formula
  if (const auto* d = std::get_if<TransformDistortion>(&model.transform)) {
    std::vector<Rat> levels = model.alphabet;
    std::sort(levels.begin(), levels.end(), [](const Rat& x, const Rat& y) { return x > y; });
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    Rat direct = levels.back();
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      CylinderEvent c;
      c.depth = 1;
      for (std::size_t s = 0; s < model.alphabet.size(); ++s)
        if (model.alphabet[s] >= levels[i]) c.words.push_back(static_cast<std::uint32_t>(s));
      direct += (levels[i] - levels[i + 1]) *
                d->g(cylinder_probability(model, d->measure_index, c, 1));
    }
    if (direct != rep.lower_bound)
      throw Error("slln_experiment: the two lower-bound routes disagree");
  }

  // simulate
  mpz_class denom(1);
  for (const Rat& v : model.alphabet)
    denom = denom * v.get_den() / gcd(mpz_class(denom), v.get_den());
  std::vector<long> numer(model.alphabet.size());
  for (std::size_t s = 0; s < model.alphabet.size(); ++s) {
    mpz_class n = model.alphabet[s].get_num() * (denom / model.alphabet[s].get_den());
    numer[s] = n.get_si();
  }
  double denom_d = denom.get_d();
  Rat lo = rep.lower_bound - params.slack;
  Rat hi = rep.upper_bound + params.slack;

  rep.mean_running_average.assign(model.measures.size(),
                                  std::vector<double>(rep.checkpoints.size(), 0.0));
  for (std::size_t mi = 0; mi < model.measures.size(); ++mi) {
    SamplerTables tables = SamplerTables::build(model.measures[mi]);
    long in_bounds = 0;
    for (long path = 0; path < params.paths; ++path) {
      Rng rng = Rng::keyed(params.seed, static_cast<std::uint64_t>(mi),
                           static_cast<std::uint64_t>(path));
      long long sum = 0;
      int state = tables.draw_start(rng);
      sum += numer[static_cast<std::size_t>(state)];
      std::size_t cp = 0;
      for (long n = 1; n <= params.horizon; ++n) {
        if (n > 1) {
          state = tables.draw_next(rng, state);
          sum += numer[static_cast<std::size_t>(state)];
        }
        if (cp < rep.checkpoints.size() && n == rep.checkpoints[cp]) {
          rep.mean_running_average[mi][cp] +=
              static_cast<double>(sum) / (static_cast<double>(n) * denom_d);
          ++cp;
        }
      }
      // exact in-bounds test at the horizon
      Rat avg = Rat(static_cast<long>(sum)) / (Rat(params.horizon) * Rat(denom));
      if (lo <= avg && avg <= hi) ++in_bounds;
    }
    for (double& v : rep.mean_running_average[mi]) v /= static_cast<double>(params.paths);
    rep.in_bounds_fraction.push_back(rat(in_bounds, params.paths));
  }

  // aggregate the capacity estimate of the bound event
  if (const auto* d = std::get_if<TransformDistortion>(&model.transform)) {
    rep.nu_estimate = d->g(rep.in_bounds_fraction[d->measure_index]);
  } else if (const auto* e = std::get_if<TransformEpsContamination>(&model.transform)) {
    rep.nu_estimate = (Rat(1) - e->eps) * rep.in_bounds_fraction[e->measure_index];
  } else {
    rep.nu_estimate = rep.in_bounds_fraction.front();
    for (const Rat& f : rep.in_bounds_fraction) rep.nu_estimate = std::min(rep.nu_estimate, f);
  }
  rep.verdict = rep.nu_estimate >= Rat(1) - params.verdict_slack;
  return rep;
}

FiniteEmbeddingCertificate slln_finite_embedding(const Capacity& nu, const FiniteMap& tau,
                                                 const RealFunction& f,
                                                 const std::optional<CredalSet>& presentation,
                                                 const CoreOptions& opts) {
  EventVerdict inv = is_invariant(nu, tau);
  if (!inv.yes)
    throw HypothesisFailure("slln_finite_embedding: capacity not invariant");
  if (presentation) {
    if (!(lower_envelope(*presentation) == nu))
      throw HypothesisFailure("slln_finite_embedding: presentation mismatch");
  } else {
    ExactnessVerdict ex = is_exact(nu, opts);
    if (!ex.exact) throw HypothesisFailure("slln_finite_embedding: not a lower probability");
  }

  FiniteEmbeddingCertificate cert;
  CycleDecomposition dec = decompose(tau);
  const int offsets = dec.max_preperiod() + dec.cycle_lcm() + 1;
  const int max_window = std::min(tau.n(), 3);
  cert.stationarity_depth = max_window;
  cert.stationarity_exact = true;

  // window-shift identity over all tuple-valued base sets
  for (int w = 1; w <= max_window && cert.stationarity_exact; ++w) {
    for (int n = 1; n <= offsets && cert.stationarity_exact; ++n) {
      // tuple of f-values along the orbit, per start point, at both offsets
      auto tuple_at = [&](int point, int off) {
        std::vector<Rat> t;
        int p = tau.iterate(point, off - 1);
        for (int i = 0; i < w; ++i) {
          t.push_back(f.at(p));
          p = tau.apply(p);
        }
        return t;
      };
      std::vector<std::vector<Rat>> distinct;
      auto tuple_id = [&](const std::vector<Rat>& t) {
        for (std::size_t i = 0; i < distinct.size(); ++i)
          if (distinct[i] == t) return i;
        distinct.push_back(t);
        return distinct.size() - 1;
      };
      std::vector<std::size_t> id_n(static_cast<std::size_t>(tau.n()));
      std::vector<std::size_t> id_n1(static_cast<std::size_t>(tau.n()));
      for (int p = 0; p < tau.n(); ++p) {
        id_n[static_cast<std::size_t>(p)] = tuple_id(tuple_at(p, n));
        id_n1[static_cast<std::size_t>(p)] = tuple_id(tuple_at(p, n + 1));
      }
      if (distinct.size() > 12)
        throw SizeCapExceeded("slln_finite_embedding: too many distinct value tuples");
      for (std::uint32_t s = 0; s < (1u << distinct.size()); ++s) {
        std::uint32_t ev_n = 0, ev_n1 = 0;
        for (int p = 0; p < tau.n(); ++p) {
          if ((s >> id_n[static_cast<std::size_t>(p)]) & 1u) ev_n |= (1u << p);
          if ((s >> id_n1[static_cast<std::size_t>(p)]) & 1u) ev_n1 |= (1u << p);
        }
        if (nu.at(ev_n) != nu.at(ev_n1)) {
          cert.stationarity_exact = false;
          break;
        }
      }
    }
  }

  cert.lower_bound = choquet(nu, f);
  cert.upper_bound = choquet_upper(nu, f);
  cert.ergodic = is_ergodic(nu, tau).yes;
  cert.convex = nu.convex();
  if (cert.ergodic) {
    RealFunction fstar = birkhoff_limit(tau, f);
    BoundEventCertificate bounds;
    bounds.lower = cert.lower_bound;
    bounds.upper = cert.upper_bound;
    std::uint32_t mask = 0;
    for (int p = 0; p < tau.n(); ++p)
      if (bounds.lower <= fstar.at(p) && fstar.at(p) <= bounds.upper) mask |= (1u << p);
    bounds.event_mask = mask;
    bounds.nu_of_event = nu.at(mask);
    bounds.pass = (bounds.nu_of_event == 1);
    cert.bounds = bounds;
  }
  cert.all_conclusions_hold =
      cert.stationarity_exact && (!cert.bounds || cert.bounds->pass);
  return cert;
}

namespace {

nlohmann::json rat_list(const std::vector<Rat>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const Rat& x : v) out.push_back(rat_str(x));
  return out;
}

std::vector<Rat> rat_list_from(const nlohmann::json& j) {
  std::vector<Rat> out;
  for (const auto& v : j) out.push_back(rat_parse(v.get<std::string>()));
  return out;
}

}  // namespace

ProcessModel load_model(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path));
  if (!j.contains("version")) throw Error("model: missing version field");
  if (j.at("version").get<int>() != 1)
    throw Error("model: unsupported version " + j.at("version").dump());
  if (j.value("kind", "") != "process-model") throw Error("model: not a process model file");

  ProcessModel model;
  model.alphabet = rat_list_from(j.at("alphabet"));
  for (const auto& jm : j.at("measures")) {
    std::string type = jm.at("type").get<std::string>();
    if (type == "iid") {
      model.measures.push_back(IidMeasure{rat_list_from(jm.at("weights"))});
    } else if (type == "markov") {
      MarkovMeasure mk;
      for (const auto& row : jm.at("rows")) mk.rows.push_back(rat_list_from(row));
      mk.start = rat_list_from(jm.at("start"));
      model.measures.push_back(std::move(mk));
    } else {
      throw Error("model: unknown measure type '" + type + "'");
    }
  }
  const auto& jt = j.at("transform");
  std::string kind = jt.at("kind").get<std::string>();
  if (kind == "distortion") {
    TransformDistortion d;
    d.measure_index = jt.value("measure", 0u);
    d.g.convex_declared = jt.value("convex", false);
    for (const auto& jp : jt.at("pieces")) {
      Distortion::Piece piece;
      piece.lo = rat_parse(jp.at("lo").get<std::string>());
      piece.hi = rat_parse(jp.at("hi").get<std::string>());
      piece.coeffs = rat_list_from(jp.at("coeffs"));
      d.g.pieces.push_back(std::move(piece));
    }
    model.transform = std::move(d);
  } else if (kind == "credal") {
    model.transform = TransformCredal{};
  } else if (kind == "eps-contamination") {
    TransformEpsContamination e;
    e.eps = rat_parse(jt.at("eps").get<std::string>());
    e.measure_index = jt.value("measure", 0u);
    model.transform = std::move(e);
  } else {
    throw Error("model: unknown transform kind '" + kind + "'");
  }
  model.validate();
  return model;
}

void save_model(const std::filesystem::path& path, const ProcessModel& model) {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "process-model";
  j["alphabet"] = rat_list(model.alphabet);
  nlohmann::json measures = nlohmann::json::array();
  for (const BaseMeasure& bm : model.measures) {
    if (const auto* iid = std::get_if<IidMeasure>(&bm)) {
      measures.push_back({{"type", "iid"}, {"weights", rat_list(iid->weights)}});
    } else {
      const auto& mk = std::get<MarkovMeasure>(bm);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : mk.rows) rows.push_back(rat_list(row));
      measures.push_back(
          {{"type", "markov"}, {"rows", rows}, {"start", rat_list(mk.start)}});
    }
  }
  j["measures"] = measures;
  if (const auto* d = std::get_if<TransformDistortion>(&model.transform)) {
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& piece : d->g.pieces)
      pieces.push_back({{"lo", rat_str(piece.lo)},
                        {"hi", rat_str(piece.hi)},
                        {"coeffs", rat_list(piece.coeffs)}});
    j["transform"] = {{"kind", "distortion"},
                      {"measure", d->measure_index},
                      {"convex", d->g.convex_declared},
                      {"pieces", pieces}};
  } else if (const auto* e = std::get_if<TransformEpsContamination>(&model.transform)) {
    j["transform"] = {{"kind", "eps-contamination"},
                      {"eps", rat_str(e->eps)},
                      {"measure", e->measure_index}};
  } else {
    j["transform"] = {{"kind", "credal"}};
  }
  // informational only; recomputed analytically on load
  ProcessErgodicityCertificate cert = ergodicity_certificate(model);
  j["certificates"] = {{"ergodicity", cert.route}, {"certified", cert.certified}};
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace ergocap
