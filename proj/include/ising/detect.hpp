// The three detection tests, each with its exact statistic and threshold:
//  - conditional scan: centers each spin by tanh(beta * m_i) using the known
//    null (beta, Q) and scans |L_S| over the class, threshold
//    2 (1 + beta ||Q||_inf) sqrt(2 (1+delta) log|C|);
//  - naive scan: scans |sum_S X_i| / sqrt(|S|) with no model knowledge,
//    threshold sqrt((1+delta) log|C| / (1-eta)), valid only for eta < 1;
//  - magnetization test: one-sided rejection on n^{1/4} * mean spin, with
//    either the scale-form cutoff delta0 * k_n, k_n = (n^{-1/4} s A)^{1/3},
//    or an empirically calibrated null-quantile cutoff.
// Plus an MC diagnostic for how tightly local fields concentrate around the
// mean-field fixed point.
#pragma once

#include <cstdint>
#include <vector>

#include "ising/graphs.hpp"
#include "ising/model.hpp"
#include "ising/signals.hpp"

namespace ising {

enum class TestKind { ConditionalScan, NaiveScan, Magnetization };

const char* test_kind_name(TestKind kind);

enum class MagnetizationCutoff { LemmaForm, Calibrated };

// A fully specified test: everything fixed before any data is seen.
struct TestSpec {
  TestKind kind = TestKind::ConditionalScan;
  double delta = 0.1;  // scan slack, in (0,1)
  double eta = 0.0;    // naive-scan contraction bound, in [0,1)
  MagnetizationCutoff cutoff_mode = MagnetizationCutoff::Calibrated;
  double cutoff_param = 0.0;  // delta0 (LemmaForm) or the calibrated cutoff itself
};

struct TestResult {
  TestKind kind = TestKind::ConditionalScan;
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;            // always exactly (statistic > threshold)
  std::int64_t argmax_set = -1;   // scan tests: first set attaining the max
  std::vector<double> per_set;    // per-set statistics when requested
};

TestResult conditional_scan(const SpinConfig& x, double beta, const CouplingMatrix& coupling,
                            const SignalClass& cls, double delta, bool keep_per_set = false);

TestResult naive_scan(const SpinConfig& x, const SignalClass& cls, double delta, double eta,
                      bool keep_per_set = false);

// k_n = (n^{-1/4} s A)^{1/3}, the scale of the magnetization shift under the
// critical alternative.
double k_n_scale(std::int64_t n, std::int64_t s, double A);

// LemmaForm: cutoff = cutoff_param * k_n_scale(n, s, A) (cutoff_param plays
// the role of the unspecified constant). Calibrated: cutoff = cutoff_param.
TestResult magnetization_test(const SpinConfig& x, std::int64_t s, double A,
                              MagnetizationCutoff mode, double cutoff_param);

// Dispatch on spec.kind. beta/coupling feed the conditional scan; cls supplies
// the class (and s); A is the targeted signal strength (LemmaForm cutoff only).
TestResult run_test(const TestSpec& spec, const SpinConfig& x, double beta,
                    const CouplingMatrix& coupling, const SignalClass& cls, double A);

struct LocalFieldDeviation {
  double q50 = 0.0, q90 = 0.0, q99 = 0.0;  // quantiles of max_i |m_i - t|
  double alpha_n = 0.0;                    // sqrt(log n / avg_degree) reference scale
  double t = 0.0;                          // fixed point of t = tanh(beta t + B)
};

LocalFieldDeviation local_field_deviation(const std::vector<SpinConfig>& samples,
                                          const CouplingMatrix& coupling, double beta,
                                          double B);

}  // namespace ising
