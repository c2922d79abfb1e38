// Config-file driven command line: one JSON document describes the graph,
// model, signal class, test, sampler, and sweep; subcommands wire the modules
// into reproducible runs. Flags override file values which override defaults;
// a seed is mandatory (no wall-clock seeding anywhere).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ising/detect.hpp"
#include "ising/graphs.hpp"
#include "ising/model.hpp"

namespace ising {

struct RunConfig {
  std::string subcommand;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;  // 0 = resolve from ISING_SCAN_THREADS, then hardware
  std::string out;       // primary output path ("" = stdout where sensible)
  std::string json_out;  // sweep JSON-lines mirror ("" = none)

  GraphSpec graph;
  Scaling scaling = Scaling::MeanField;
  double beta = 0.0;

  // Signal-class construction.
  std::int64_t s = 1;
  std::int64_t class_count = 1;
  bool disjoint = true;
  bool lattice_cubes = false;
  std::int64_t min_separation = 0;
  std::uint64_t class_seed = 0;

  TestSpec test;
  double A = 0.0;               // signal strength for test/sample alternatives
  std::int64_t set_index = -1;  // alternative set to plant; -1 = null data

  SamplerConfig sampler;

  // Sweep axes.
  std::vector<double> sweep_betas;
  std::vector<std::int64_t> sweep_s;
  std::vector<double> sweep_A;
  bool sweep_A_is_tanh = false;
  std::vector<std::string> sweep_tests;  // test kind names
  std::int64_t replicates = 100;
  bool exhaustive_type2 = false;

  // Oracle subcommand.
  std::string oracle_mode = "verify";  // verify | second-moment | fixed-point
  std::int64_t instances = 500;
  double tol = 1e-10;
  double B = 0.0;
  double oracle_A = 0.0;
  bool limit_mode = false;
  std::vector<std::vector<std::int32_t>> oracle_sets;

  // Predict subcommand (-1/0 = fall back to model.beta, graph.n, signal.s).
  double predict_beta = -1.0;
  std::int64_t predict_n = 0;
  std::int64_t predict_s = 0;
  double regime_c = 0.5;
  double regime_C = 4.0;

  std::string to_json() const;  // fully resolved config echo
};

// Strict parse: unknown keys, wrong types, and (unless require_seed is false
// because --seed was given) a missing seed are errors naming the offending
// field path.
RunConfig parse_config(const std::string& text, bool require_seed = true);

// Executes cfg.subcommand; prints the resolved config to stderr first.
// Returns a process exit status.
int run(const RunConfig& cfg);

// Flag > config > ISING_SCAN_THREADS > hardware concurrency.
int resolve_threads(int configured);

}  // namespace ising
