#include "ergocap/scenario.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ergocap/ergodic.hpp"
#include "ergocap/gen.hpp"
#include "ergocap/process.hpp"

namespace ergocap {

namespace {

namespace fs = std::filesystem;

struct Artifacts {
  std::string records;
  std::string report;
  std::string csv;
  std::string csv_name = "trajectories.csv";

  void rec(const RecordWriter& w) { records += w.line() + "\n"; }
  void line(const std::string& s) { report += s + "\n"; }

  void flush(const Scenario& s) {
    if (s.out_dir.empty()) {
      std::cout << records;
      return;
    }
    fs::create_directories(s.out_dir);
    write_file_atomic(fs::path(s.out_dir) / "records.rec", records);
    // the timestamp lives in this single designated header line
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream head;
    head << "# generated-at " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << "\n";
    write_file_atomic(fs::path(s.out_dir) / "report.txt", head.str() + report);
    if (!csv.empty()) write_file_atomic(fs::path(s.out_dir) / csv_name, csv);
  }
};

RecordWriter header(const Scenario& s) {
  RecordWriter w;
  w.field("record", std::string("header"))
      .field("tool", std::string("ergocap"))
      .field("schema", 1L)
      .field("command", s.command)
      .field("seed", static_cast<long>(s.seed))
      .field("n", static_cast<long>(s.n))
      .field("count", static_cast<long>(s.count))
      .field("N", s.big_n)
      .field("tol", s.tol)
      .field("paths", s.paths)
      .field("horizon", s.horizon)
      .field("kind", s.kind)
      .field("seq", s.seq_kind)
      .field("depth", static_cast<long>(s.depth))
      .field("n_cap", static_cast<long>(s.n_cap));
  return w;
}

RealFunction parse_function(const FiniteSpace& space, const std::string& spec) {
  if (spec.empty()) {
    // default: indicator of the first point
    return RealFunction::indicator(Event::singleton(0, space.n()));
  }
  std::vector<Rat> values;
  std::string tok;
  std::istringstream ss(spec);
  while (std::getline(ss, tok, ',')) values.push_back(rat_parse(tok));
  return RealFunction(space, std::move(values));
}

InstanceBundle resolve_instance(const Scenario& s) {
  if (!s.instance_path.empty()) return load_bundle(s.instance_path);
  return generate_instance(gen_kind_from_string(s.kind), s.seed, s.n);
}

ProcessModel bernoulli_square_model() {
  ProcessModel model;
  model.alphabet = {Rat(0), Rat(1)};
  model.measures.push_back(IidMeasure{{rat(1, 2), rat(1, 2)}});
  model.transform = TransformDistortion{Distortion::power(2), 0};
  model.validate();
  return model;
}

ProcessModel credal_bernoulli_model() {
  ProcessModel model;
  model.alphabet = {Rat(0), Rat(1)};
  model.measures.push_back(IidMeasure{{rat(3, 4), rat(1, 4)}});
  model.measures.push_back(IidMeasure{{rat(1, 4), rat(3, 4)}});
  model.transform = TransformCredal{};
  model.validate();
  return model;
}

ProcessModel resolve_model(const Scenario& s) {
  if (!s.model_path.empty()) return load_model(s.model_path);
  if (s.kind == "model-distorted-bernoulli") return bernoulli_square_model();
  if (s.kind == "model-credal-bernoulli") return credal_bernoulli_model();
  throw Error("slln: provide --model or a model-* kind");
}

std::string clause_tag(const ClauseResult& c) {
  if (!c.applicable) return "hypothesis-unmet";
  return c.holds ? "pass" : "fail";
}

int run_gen(const Scenario& s, Artifacts& art) {
  if (s.kind.rfind("model-", 0) == 0) {
    ProcessModel model = resolve_model(s);
    if (!s.out_dir.empty()) {
      fs::create_directories(s.out_dir);
      save_model(fs::path(s.out_dir) / "model.json", model);
    }
    art.rec(RecordWriter().field("record", std::string("generated"))
                .field("kind", s.kind)
                .field("artifact", std::string("model.json")));
    art.line("generated process model " + s.kind);
    return 0;
  }
  for (int i = 0; i < s.count; ++i) {
    std::uint64_t seed = s.seed + static_cast<std::uint64_t>(i);
    GenKind kind = gen_kind_from_string(s.kind);
    InstanceBundle bundle = generate_instance(kind, seed, s.n);
    std::string name = s.count == 1 ? "instance.json"
                                    : "instance-" + std::to_string(seed) + ".json";
    if (!s.out_dir.empty()) {
      fs::create_directories(s.out_dir);
      save_bundle(fs::path(s.out_dir) / name, bundle);
      if (kind == GenKind::Map || kind == GenKind::Permutation) {
        std::ostringstream tables;
        save_map(tables, bundle.tau);
        tables << "\n";
        save_decomposition(tables, decompose(bundle.tau));
        tables << "\n";
        save_measure_family(tables, ergodic_measures(bundle.tau));
        write_file_atomic(fs::path(s.out_dir) /
                              (s.count == 1 ? "map.txt"
                                            : "map-" + std::to_string(seed) + ".txt"),
                          tables.str());
      }
    }
    art.rec(RecordWriter().field("record", std::string("generated"))
                .field("id", bundle.id)
                .field("artifact", name));
    art.line("generated instance " + bundle.id);
  }
  return 0;
}

int run_core(const Scenario& s, Artifacts& art) {
  InstanceBundle bundle = resolve_instance(s);
  CoreOptions opts;
  ExactnessVerdict v = is_exact(bundle.nu, opts);
  art.rec(RecordWriter().field("record", std::string("core"))
              .field("id", bundle.id)
              .field("vertices", static_cast<long>(v.core.vertices.size()))
              .field("provenance", std::string(v.core.provenance == CoreProvenance::MarginalHull
                                                   ? "marginal-hull"
                                                   : "general-enumeration"))
              .field("empty", v.core.empty)
              .field("exact", v.exact));
  for (const auto& vtx : v.core.vertices) {
    RecordWriter w;
    w.field("record", std::string("vertex"));
    std::string masses;
    for (int i = 0; i < bundle.nu.n(); ++i) {
      if (i) masses += ",";
      masses += rat_str(vtx.mass(i));
    }
    w.field("masses", masses);
    art.rec(w);
  }
  art.line("core of " + bundle.id + ": " + std::to_string(v.core.vertices.size()) +
           " vertices, exact=" + (v.exact ? "yes" : "no"));
  return 0;
}

int run_choquet(const Scenario& s, Artifacts& art) {
  InstanceBundle bundle = resolve_instance(s);
  RealFunction f = parse_function(bundle.nu.space(), s.f_spec);
  Rat lo = choquet(bundle.nu, f);
  Rat hi = choquet_upper(bundle.nu, f);
  art.rec(RecordWriter().field("record", std::string("choquet"))
              .field("id", bundle.id)
              .field("lower", lo)
              .field("upper", hi));
  art.line("choquet integral of " + bundle.id + ": lower " + rat_str(lo) + ", upper " +
           rat_str(hi));
  return 0;
}

int run_audit(const Scenario& s, Artifacts& art) {
  static const GenKind cycle[] = {GenKind::InvariantEnvelope, GenKind::UnanimityFixed,
                                  GenKind::DistortionSquare, GenKind::EpsContamination,
                                  GenKind::Convex, GenKind::CredalInvariant};
  bool violation = false;
  long convex_predictive_samples = 0, convex_predictive_yes = 0;
  for (int i = 0; i < s.count; ++i) {
    InstanceBundle bundle =
        !s.instance_path.empty()
            ? load_bundle(s.instance_path)
            : generate_instance(cycle[static_cast<std::size_t>(i) % 6],
                                s.seed + static_cast<std::uint64_t>(i), s.n);
    AuditInstance instance{bundle.id, bundle.nu, bundle.tau, bundle.presentation};
    AuditReport rep = implication_audit(instance);
    for (const auto& rec : rep.records) {
      RecordWriter w;
      w.field("record", std::string("audit"))
          .field("id", rep.instance_id)
          .field("implication", rec.implication)
          .field("verdict", std::string(rec.verdict == AuditRecord::Verdict::Pass ? "pass"
                                        : rec.verdict == AuditRecord::Verdict::Violated
                                            ? "violated"
                                            : "not-applicable"));
      if (!rec.witness.empty()) w.field("witness", rec.witness);
      art.rec(w);
    }
    if (rep.predictive_convexity_sample) {
      ++convex_predictive_samples;
      if (*rep.predictive_convexity_sample) ++convex_predictive_yes;
    }
    if (rep.any_violation) {
      violation = true;
      if (!s.out_dir.empty())
        save_bundle(fs::path(s.out_dir) / ("counterexample-" + rep.instance_id + ".json"),
                    bundle);
    }
    if (!s.instance_path.empty()) break;
  }
  if (convex_predictive_samples > 0) {
    art.rec(RecordWriter().field("record", std::string("measurement"))
                .field("name", std::string("predictive-convexity-frequency"))
                .field("yes", convex_predictive_yes)
                .field("total", convex_predictive_samples));
    art.line("measurement: predictive of a convex prior was convex in " +
             std::to_string(convex_predictive_yes) + "/" +
             std::to_string(convex_predictive_samples) + " sampled instances");
  }
  art.line(violation ? "audit: VIOLATIONS found" : "audit: all implications hold");
  return violation ? 1 : 0;
}

int run_ergodic(const Scenario& s, Artifacts& art) {
  InstanceBundle bundle = resolve_instance(s);
  RealFunction f = parse_function(bundle.nu.space(), s.f_spec);
  ErgodicCertificate cert =
      verify_pointwise_ergodic(bundle.nu, bundle.tau, f, bundle.presentation);
  bool fail = false;
  for (const auto& c : cert.clauses) {
    RecordWriter w;
    w.field("record", std::string("clause"))
        .field("id", bundle.id)
        .field("clause", c.clause)
        .field("status", clause_tag(c))
        .field("exact", c.exact);
    if (c.clause == "ET.bounds" && cert.bounds) {
      w.field("lower", cert.bounds->lower)
          .field("upper", cert.bounds->upper)
          .field("event", Event(cert.bounds->event_mask, bundle.nu.n()).bits())
          .field("nu", cert.bounds->nu_of_event);
    }
    art.rec(w);
    if (c.applicable && !c.holds) fail = true;
    art.line("clause " + c.clause + ": " + clause_tag(c) +
             (c.detail.empty() ? "" : " (" + c.detail + ")"));
  }

  // sharpened clauses when the stronger hypotheses hold
  if (bundle.nu.convex() && is_strongly_invariant(bundle.nu, bundle.tau).yes) {
    BirkhoffEnvelopeCertificate sharp = verify_birkhoff_envelope(bundle.nu, bundle.tau, f);
    for (const auto& c : sharp.clauses) {
      RecordWriter w;
      w.field("record", std::string("clause"))
          .field("id", bundle.id)
          .field("clause", c.clause)
          .field("status", clause_tag(c))
          .field("exact", c.exact);
      if (c.clause == "CE.bounds" && sharp.bounds) {
        w.field("lower", sharp.bounds->lower)
            .field("upper", sharp.bounds->upper)
            .field("event", Event(sharp.bounds->event_mask, bundle.nu.n()).bits())
            .field("nu", sharp.bounds->nu_of_event);
      }
      art.rec(w);
      if (c.applicable && !c.holds) fail = true;
      art.line("clause " + c.clause + ": " + clause_tag(c));
    }
  }
  return fail ? 1 : 0;
}

SeqKind seq_kind_from_string(const std::string& s) {
  if (s == "additive") return SeqKind::AdditiveFromF;
  if (s == "abs") return SeqKind::AbsOfAdditive;
  if (s == "negabs") return SeqKind::NegAbsOfAdditive;
  throw Error("unknown sequence kind '" + s + "' (additive|abs|negabs)");
}

int run_kingman(const Scenario& s, Artifacts& art) {
  InstanceBundle bundle = resolve_instance(s);
  if (!bundle.presentation)
    throw HypothesisFailure("kingman: instance carries no credal presentation");
  RealFunction f = parse_function(bundle.nu.space(), s.f_spec);
  SuperadditiveSequence seq(seq_kind_from_string(s.seq_kind), bundle.tau, f);
  KingmanCertificate cert = verify_kingman(bundle.nu, bundle.tau, seq,
                                           *bundle.presentation, s.big_n, s.tol);
  bool fail = false;
  for (const auto& c : cert.clauses) {
    RecordWriter w;
    w.field("record", std::string("clause"))
        .field("id", bundle.id)
        .field("clause", c.clause)
        .field("status", clause_tag(c))
        .field("exact", c.exact);
    if (c.clause == "KG.sup" && cert.sup_of_lower_integrals)
      w.field("sup", *cert.sup_of_lower_integrals).field("at", cert.sup_attained_at);
    if (c.clause == "KG.inf" && cert.inf_of_upper_integrals)
      w.field("inf", *cert.inf_of_upper_integrals).field("at", cert.inf_attained_at);
    if (c.clause == "KG.bounds" && cert.bounds) {
      w.field("lower", cert.bounds->lower)
          .field("upper", cert.bounds->upper)
          .field("nu", cert.bounds->nu_of_event);
    }
    art.rec(w);
    if (c.applicable && !c.holds) fail = true;
    art.line("clause " + c.clause + ": " + clause_tag(c) +
             (c.detail.empty() ? "" : " (" + c.detail + ")"));
  }
  if (s.emit_trajectories) {
    std::ostringstream csv;
    csv << "n";
    for (int p = 0; p < bundle.nu.n(); ++p) csv << ",point" << p;
    csv << "\n";
    long cap = std::min<long>(s.big_n, 512);
    for (long n = 1; n <= cap; ++n) {
      csv << n;
      for (int p = 0; p < bundle.nu.n(); ++p) {
        Rat v = seq.eval(static_cast<int>(n), p) / Rat(n);
        csv << "," << std::setprecision(17) << rat_double(v);
      }
      csv << "\n";
    }
    art.csv = csv.str();
  }
  return fail ? 1 : 0;
}

int run_slln(const Scenario& s, Artifacts& art) {
  ProcessModel model = resolve_model(s);
  ShiftInvarianceVerdict shift = check_shift_invariance(model, s.depth);
  {
    RecordWriter w;
    w.field("record", std::string("shift-invariance"))
        .field("depth", static_cast<long>(s.depth))
        .field("invariant", shift.invariant);
    if (shift.convex_on_algebra)
      w.field("convex_on_algebra", *shift.convex_on_algebra);
    art.rec(w);
  }

  SllnParams params;
  params.horizon = s.horizon;
  params.paths = s.paths;
  params.seed = s.seed;
  SllnReport rep = slln_experiment(model, params);

  RecordWriter w;
  w.field("record", std::string("slln"))
      .field("L", rep.lower_bound)
      .field("U", rep.upper_bound)
      .field("stationary", rep.stationarity_checked)
      .field("ergodicity", rep.ergodicity.route)
      .field("hypotheses", std::string(rep.hypotheses_complete ? "complete"
                                                               : "hypothesis-incomplete"))
      .field("nu_estimate", rep.nu_estimate)
      .field("verdict", rep.verdict);
  for (std::size_t mi = 0; mi < rep.in_bounds_fraction.size(); ++mi)
    w.field("fraction" + std::to_string(mi), rep.in_bounds_fraction[mi]);
  art.rec(w);

  art.line("slln bounds: L=" + rat_str(rep.lower_bound) + " U=" + rat_str(rep.upper_bound));
  art.line("hypotheses: " + (rep.hypotheses_complete ? "complete" : rep.hypothesis_note));
  art.line(std::string("verdict: ") + (rep.verdict ? "pass" : "fail") +
           " (nu-estimate " + rat_str(rep.nu_estimate) + ")");

  if (s.emit_trajectories) {
    TrajectoryBatch batch = sample_trajectories(model, s.horizon, s.paths, s.seed);
    std::ostringstream csv;
    csv << "measure,path,checkpoint,running_average\n";
    for (const auto& row : batch.rows)
      csv << row.measure << "," << row.path << "," << row.checkpoint << ","
          << std::setprecision(17) << row.running_average << "\n";
    art.csv = csv.str();
  }

  if (!shift.invariant) return 1;
  if (!rep.hypotheses_complete) return 3;
  return rep.verdict ? 0 : 1;
}

}  // namespace

int run_scenario(const Scenario& s) {
  Artifacts art;
  art.rec(header(s));
  int code = 2;
  try {
    set_pair_scan_cap(s.n_cap);
    if (s.command == "gen") code = run_gen(s, art);
    else if (s.command == "core") code = run_core(s, art);
    else if (s.command == "choquet") code = run_choquet(s, art);
    else if (s.command == "audit") code = run_audit(s, art);
    else if (s.command == "ergodic") code = run_ergodic(s, art);
    else if (s.command == "kingman") code = run_kingman(s, art);
    else if (s.command == "slln") code = run_slln(s, art);
    else {
      std::cerr << "unknown command '" << s.command << "'\n";
      return 2;
    }
  } catch (const HypothesisFailure& e) {
    art.rec(RecordWriter().field("record", std::string("hypothesis-failure"))
                .field("what", std::string(e.what())));
    art.line(std::string("hypothesis failure: ") + e.what());
    art.flush(s);
    return 3;
  } catch (const SizeCapExceeded& e) {
    std::cerr << "size cap: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  art.rec(RecordWriter().field("record", std::string("exit")).field("code",
                                                                    static_cast<long>(code)));
  art.flush(s);
  return code;
}

}  // namespace ergocap
