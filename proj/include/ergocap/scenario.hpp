#pragma once

#include <cstdint>
#include <string>

#include "ergocap/rat.hpp"

namespace ergocap {

/// A resolved command invocation. Exit codes:
///   0  every verdict passed
///   1  a conclusion failed under satisfied hypotheses
///   2  invalid input
///   3  hypothesis failure only (vacuous runs)
struct Scenario {
  std::string command;  // gen | audit | ergodic | kingman | slln | core | choquet
  std::string instance_path;
  std::string model_path;
  std::string kind = "invariant-envelope";  // gen kind or model-* template
  std::uint64_t seed = 1;
  int n = 4;
  int count = 1;        // batch size for gen/audit sweeps
  long big_n = 10000;   // kingman horizon
  Rat tol = rat(1, 1000000);
  long paths = 10000;
  long horizon = 10000;
  std::string out_dir;  // artifacts directory; empty prints records to stdout
  int n_cap = 10;
  std::string f_spec;   // comma-separated rational values
  std::string seq_kind = "additive";  // additive | abs | negabs
  int depth = 3;
  bool emit_trajectories = false;
};

int run_scenario(const Scenario& s);

}  // namespace ergocap
