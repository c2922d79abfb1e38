// Monte-Carlo and exact estimation of worst-case risk
// (type I + worst-case type II) for any (test, null model, alternative)
// triple, grid sweeps that trace empirical detection boundaries into CSV/JSON
// records, and the deterministic predicted-regime classifier.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ising/detect.hpp"
#include "ising/graphs.hpp"
#include "ising/model.hpp"
#include "ising/oracle.hpp"
#include "ising/signals.hpp"

namespace ising {

struct RiskEstimate {
  double type1 = 0.0, type1_se = 0.0;  // P0(reject) and its MC standard error
  double type2 = 0.0, type2_se = 0.0;  // worst tested P_mu(accept), its SE
  double risk = 0.0;                   // type1 + type2, exactly
  std::int64_t replicates = 0;         // per arm
  std::uint64_t base_seed = 0;
  std::int64_t cell_id = 0;
  std::int64_t worst_set = 0;  // alternative set attaining type2
};

// Null model for risk experiments: zero field, known (beta, Q).
struct NullModel {
  double beta = 0.0;
  CouplingMatrix coupling;
};

// Monte-Carlo risk: `replicates` null draws for type I and, per tested
// alternative set, `replicates` draws at field mu_S(A) for type II. Replicate
// r of arm a uses the derived seed (base_seed, cell_id, a*replicates + r), so
// results do not depend on the thread count. The exact inverse-CDF sampler is
// used automatically for n <= 20; otherwise Glauber with `sampler` settings.
// exhaustive_type2 tests every set in the class instead of only set 0.
RiskEstimate estimate_risk(const TestSpec& test, const NullModel& null_model,
                           const AlternativeSpec& alt, std::int64_t replicates,
                           const SamplerConfig& sampler, std::uint64_t base_seed,
                           std::int64_t cell_id = 0, bool exhaustive_type2 = false,
                           int threads = 1);

// Exact rejection probability: sum of state probabilities over {x : reject}.
// n <= 20. Conditioning restricts both the measure and the event.
double exact_rejection_probability(const TestSpec& test, const ModelParams& params,
                                   const SignalClass& cls, double A,
                                   Conditioning conditioning = Conditioning::None);

// Exact risk via exact_rejection_probability on the null and each tested
// alternative (standard errors are zero).
RiskEstimate exact_risk(const TestSpec& test, const NullModel& null_model,
                        const AlternativeSpec& alt, bool exhaustive_type2 = false,
                        Conditioning conditioning = Conditioning::None);

// Empirical null quantile of the magnetization statistic n^{1/4} * mean spin
// over `replicates` independent draws (exact sampler for n <= 20).
double calibrate_magnetization_cutoff(const NullModel& null_model, std::int64_t replicates,
                                      double quantile, const SamplerConfig& sampler,
                                      std::uint64_t base_seed, std::int64_t cell_id = 0);

struct SweepGrid {
  GraphSpec graph;
  Scaling scaling = Scaling::MeanField;
  std::vector<double> betas;
  std::vector<std::int64_t> s_values;
  std::vector<double> A_values;  // field strengths, or tanh targets (A_is_tanh)
  bool A_is_tanh = false;
  std::vector<TestSpec> tests;
  std::int64_t class_count = 2;      // sets per signal class
  bool lattice_class = false;        // cube class instead of disjoint blocks
  std::int64_t min_separation = 0;   // subcollection separation (lattice classes)
  std::int64_t replicates = 100;
  SamplerConfig sampler;             // seed field ignored; base_seed rules
  std::uint64_t base_seed = 0;
  bool exhaustive_type2 = false;
  int threads = 1;
  void validate() const;
};

struct RiskRecord {
  std::string graph_id;
  std::int64_t n = 0;
  double beta = 0.0;
  std::int64_t s = 0;
  double A = 0.0;
  double tanh_A = 0.0;
  std::string test;
  RiskEstimate estimate;
  std::uint64_t seed = 0;
  std::int64_t cell_id = 0;
  std::string csv_row() const;   // no trailing newline
  std::string json_line() const; // single-line JSON object
};

extern const char* const kRiskCsvHeader;  // exact column list

// Runs every (test, beta, s, A) cell in deterministic order, appending each
// record to csv_path as soon as it finishes (and mirroring to json_path as
// JSON Lines when nonempty). If csv_path already holds k data rows from an
// earlier run of the same grid, the first k cells are skipped, making reruns
// crash-safe and byte-identical.
std::vector<RiskRecord> boundary_sweep(const SweepGrid& grid, const std::string& csv_path,
                                       const std::string& json_path = "");

enum class BoundaryRegime { Impossible, RateSqrtLogNOverS, RateNQuarterOverS };

const char* boundary_regime_name(BoundaryRegime regime);

struct BoundaryPrediction {
  BoundaryRegime regime = BoundaryRegime::Impossible;
  double rate = 0.0;       // predicted tanh(A) scale; 0 when impossible
  std::string conditions;  // which branch of the decision tree fired and why
  double c = 0.5, C = 4.0; // regime constants (conventions, not derived values)
};

// Deterministic regime map: s <= c log n -> impossible; beta != 1 ->
// sqrt(log n / s); beta == 1 -> sqrt(log n / s) below s* = sqrt(n)/log n and
// n^{1/4}/s above it. graph_family only annotates the conditions string.
BoundaryPrediction predicted_boundary(double beta, std::int64_t n, std::int64_t s,
                                      GraphFamily family = GraphFamily::Complete,
                                      double c = 0.5, double C = 4.0);

// Field strength whose tanh equals `target`, capping unreachable targets
// (>= 1) at atanh(1 - 1e-12).
double field_from_tanh(double target);

}  // namespace ising
