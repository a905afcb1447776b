#include <CLI11.hpp>

#include "ergocap/scenario.hpp"

using ergocap::Scenario;

namespace {

void add_common(CLI::App* cmd, Scenario& s) {
  cmd->add_option("--instance", s.instance_path, "instance bundle (.json) or table file");
  cmd->add_option("--model", s.model_path, "process model file (.json)");
  cmd->add_option("--seed", s.seed, "generator seed");
  cmd->add_option("--out", s.out_dir, "output directory for report, records and CSV");
  cmd->add_option("--n", s.n, "space size for generated instances");
  cmd->add_option("--n-cap", s.n_cap, "override for the pairwise-scan size cap");
  cmd->add_option("--count", s.count, "batch size for gen/audit sweeps");
  cmd->add_option("--N", s.big_n, "index horizon for sup/inf sweeps");
  cmd->add_option("--tol", [&s](const std::vector<std::string>& v) {
        s.tol = ergocap::rat_parse(v.back());
        return true;
      }, "tolerance for bracketed sup/inf checks (rational or decimal)");
  cmd->add_option("--paths", s.paths, "simulated paths per measure");
  cmd->add_option("--horizon", s.horizon, "simulated path length");
  cmd->add_option("--f", s.f_spec, "function values, comma-separated rationals");
  cmd->add_option("--depth", s.depth, "cylinder depth for process checks");
  cmd->add_flag("--trajectories", s.emit_trajectories,
                "emit trajectory CSV (columns documented per command)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ergocap: exact capacities, Choquet integrals, cores, invariance audits,\n"
      "ergodic and subadditive certificates, and law-of-large-numbers checks\n"
      "on finite spaces"};
  app.require_subcommand(1);

  Scenario s;

  auto* gen = app.add_subcommand(
      "gen", "generate a seeded instance or model (reproducible from the seed)");
  gen->add_option("--kind", s.kind,
                  "map | permutation | convex | convex-nontm | belief | "
                  "invariant-envelope | credal-invariant | distortion-square | "
                  "eps-contamination | unanimity-fixed | model-distorted-bernoulli | "
                  "model-credal-bernoulli");
  add_common(gen, s);

  auto* audit = app.add_subcommand(
      "audit", "cross-check the invariance implication structure; CSV-free, one "
               "machine record per implication");
  audit->add_option("--kind", s.kind, "generator kind for batch audits");
  add_common(audit, s);

  auto* core = app.add_subcommand("core", "enumerate core vertices and decide exactness");
  core->add_option("--kind", s.kind, "generator kind when no --instance is given");
  add_common(core, s);

  auto* choquet = app.add_subcommand("choquet", "lower and upper Choquet integrals");
  choquet->add_option("--kind", s.kind, "generator kind when no --instance is given");
  add_common(choquet, s);

  auto* ergodic = app.add_subcommand(
      "ergodic", "certify the pointwise ergodic statement (and the sharpened "
                 "clauses when convexity and strong invariance hold)");
  ergodic->add_option("--kind", s.kind, "generator kind when no --instance is given");
  add_common(ergodic, s);

  auto* kingman = app.add_subcommand(
      "kingman", "certify the super/subadditive statement; trajectory CSV columns: "
                 "n,point0,point1,...");
  kingman->add_option("--seq", s.seq_kind, "additive | abs | negabs");
  kingman->add_option("--kind", s.kind, "generator kind when no --instance is given");
  add_common(kingman, s);

  auto* slln = app.add_subcommand(
      "slln", "law-of-large-numbers experiment; trajectory CSV columns: "
              "measure,path,checkpoint,running_average");
  slln->add_option("--kind", s.kind, "model-distorted-bernoulli | model-credal-bernoulli");
  add_common(slln, s);

  CLI11_PARSE(app, argc, argv);

  for (auto* cmd : {gen, audit, core, choquet, ergodic, kingman, slln})
    if (cmd->parsed()) s.command = cmd->get_name();

  return ergocap::run_scenario(s);
}
