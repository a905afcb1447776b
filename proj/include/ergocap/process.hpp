#pragma once

#include <filesystem>
#include <variant>

#include "ergocap/ergodic.hpp"

namespace ergocap {

/// Per-symbol weights of an i.i.d. coordinate process.
struct IidMeasure {
  std::vector<Rat> weights;
};

/// Stationary Markov coordinate process: stochastic rows plus a start
/// distribution that is an exact fixed point of the rows.
struct MarkovMeasure {
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> start;
  bool start_is_stationary() const;
  /// Positive-transition graph strongly connected.
  bool irreducible() const;
  /// gcd of cycle lengths through state 0 equals 1 (checked on the
  /// positive-transition graph).
  bool aperiodic() const;
};

using BaseMeasure = std::variant<IidMeasure, MarkovMeasure>;

/// Nondecreasing piecewise-polynomial distortion on [0,1] with g(0)=0,
/// g(1)=1, exact rational coefficients.
struct Distortion {
  struct Piece {
    Rat lo, hi;               // [lo, hi]
    std::vector<Rat> coeffs;  // c0 + c1 t + c2 t^2 + ...
  };
  std::vector<Piece> pieces;
  bool convex_declared = false;

  Rat operator()(const Rat& t) const;
  static Distortion power(unsigned k);  // g(t) = t^k
  static Distortion identity() { return power(1); }
};

struct TransformDistortion {
  Distortion g;
  std::size_t measure_index = 0;
};
struct TransformCredal {};
/// (1-eps) P plus eps times the vacuous capacity. Convex, but graded on
/// proper full-P events, so never an ordinary distortion.
struct TransformEpsContamination {
  Rat eps;
  std::size_t measure_index = 0;
};
using Transform =
    std::variant<TransformDistortion, TransformCredal, TransformEpsContamination>;

/// A finite-alphabet stationary process under a capacity: base measures on
/// the path space plus a capacity transform (distortion of one base measure
/// or the lower envelope of the family).
struct ProcessModel {
  std::vector<Rat> alphabet;  // symbol s -> real value
  std::vector<BaseMeasure> measures;
  Transform transform;

  std::size_t symbol_count() const { return alphabet.size(); }
  void validate() const;  // throws on malformed models
  bool transform_is_distortion() const {
    return std::holds_alternative<TransformDistortion>(transform);
  }
  bool transform_convex_declared() const;
};

ProcessModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const ProcessModel& model);

/// A depth-k cylinder: a base set of length-k words, each word encoded in
/// base |alphabet| with the first coordinate as the least significant digit.
struct CylinderEvent {
  int depth = 1;
  std::vector<std::uint32_t> words;  // sorted, duplicate-free

  static CylinderEvent full(const ProcessModel& model, int depth);
};

/// Exact probability of a word under one base measure, with the word event
/// starting at the given 1-based offset (offsets > 1 only matter for Markov
/// chains started off their stationary profile).
Rat word_probability(const ProcessModel& model, std::size_t measure_index,
                     const std::vector<int>& word, int offset = 1);

/// Exact base-measure probability of the cylinder's word set.
Rat cylinder_probability(const ProcessModel& model, std::size_t measure_index,
                         const CylinderEvent& c, int offset = 1);

/// Capacity of the cylinder under the model transform:
/// g(P(base set)) for distortions, the minimum over the family otherwise.
Rat pushforward(const ProcessModel& model, const CylinderEvent& c, int offset = 1,
                int depth_cap = 8);

/// The capacity induced on the depth-k word algebra, materialized as a
/// Capacity over a space with one point per word. Capped so the value table
/// stays at desk scale.
Capacity pushforward_algebra(const ProcessModel& model, int depth, int point_cap = 12);

struct StationarityVerdict {
  bool yes = true;
  int witness_offset = 0;
  int witness_window = 0;
  std::vector<std::uint32_t> witness_words;
};

/// Eq-of-window check: the capacity of every word event is unchanged when
/// the window shifts by one, for offsets up to n_max and windows up to k.
/// Exhaustive over base sets while the word count stays small, seeded
/// sampling beyond.
StationarityVerdict check_stationarity(const ProcessModel& model, int depth,
                                       int n_max, std::uint64_t sample_seed = 1);

struct ShiftInvarianceVerdict {
  bool invariant = true;
  std::optional<CylinderEvent> invariance_witness;
  /// Set when the transform declares convexity: verdict for the induced
  /// capacity on the depth algebra.
  std::optional<bool> convex_on_algebra;
  std::optional<PairWitness> convexity_witness;
};

/// Cylinder step of the pushforward-law lemma: nu_f(C) = nu_f(shift^{-1} C)
/// for every cylinder of depth <= k, checked exhaustively.
ShiftInvarianceVerdict check_shift_invariance(const ProcessModel& model, int depth,
                                              int algebra_point_cap = 10);

/// Analytic tail certificate. Distortions of an ergodic base measure and
/// envelopes of finitely many ergodic measures certify {0,1} values on the
/// invariant algebra; anything else stays uncertified.
struct ProcessErgodicityCertificate {
  bool certified = false;
  std::string route;  // "distorted-iid", "distorted-markov", "credal-ergodic", "uncertified"
};

ProcessErgodicityCertificate ergodicity_certificate(const ProcessModel& model);

struct SllnParams {
  long horizon = 10000;
  long paths = 10000;
  std::uint64_t seed = 0;
  Rat slack = rat(1, 50);        // per-path bound slack
  Rat verdict_slack = rat(1, 100);  // required nu-estimate is 1 - this
};

struct SllnReport {
  Rat lower_bound;  // Choquet integral of the first coordinate
  Rat upper_bound;  // conjugate integral
  bool hypotheses_complete = false;  // stationary + convex transform + certified ergodic
  std::string hypothesis_note;
  ProcessErgodicityCertificate ergodicity;
  bool stationarity_checked = false;
  std::vector<Rat> in_bounds_fraction;  // per measure, at the horizon
  Rat nu_estimate;
  bool verdict = false;
  SllnParams params;
  /// simulation trace: per measure, per checkpoint, mean running average
  std::vector<long> checkpoints;
  std::vector<std::vector<double>> mean_running_average;
};

/// Monte-Carlo check that empirical averages land between the exact Choquet
/// bounds of the first coordinate. Hypothesis failures downgrade the run to
/// a labeled bounds-only experiment; the sampling still executes.
SllnReport slln_experiment(const ProcessModel& model, const SllnParams& params);

/// Per-path running averages at the checkpoints, for CSV emission.
/// Row layout: (measure, path, checkpoint, running average).
struct TrajectoryBatch {
  std::uint64_t seed = 0;
  std::vector<long> checkpoints;
  struct Row {
    std::size_t measure;
    long path;
    long checkpoint;
    double running_average;
  };
  std::vector<Row> rows;
};

TrajectoryBatch sample_trajectories(const ProcessModel& model, long horizon, long paths,
                                    std::uint64_t seed);

/// The finite embedding: the coordinate process f_n = f(tau^{n-1} .) on a
/// finite system, with the window-shift identity checked exactly and the
/// law-of-large-numbers display certified through the cycle machinery.
struct FiniteEmbeddingCertificate {
  bool stationarity_exact = false;
  int stationarity_depth = 0;
  Rat lower_bound;   // choquet(nu, f)
  Rat upper_bound;   // choquet_upper(nu, f)
  bool ergodic = false;
  bool convex = false;  // hypothesis record; the bound event is computed
                        // whenever the capacity is ergodic
  std::optional<BoundEventCertificate> bounds;
  bool all_conclusions_hold = false;
};

FiniteEmbeddingCertificate slln_finite_embedding(const Capacity& nu, const FiniteMap& tau,
                                                 const RealFunction& f,
                                                 const std::optional<CredalSet>& presentation = {},
                                                 const CoreOptions& opts = {});

}  // namespace ergocap
