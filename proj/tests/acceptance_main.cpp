// Acceptance gate: ten numbered end-to-end checks over the whole library.
// Each criterion prints exactly one "criterion K: PASS/FAIL (...)" line and
// writes a deterministic JSON artifact under the output directory (default
// acceptance_out/). Criterion 10 re-runs criteria 1-9 twice with the same
// seeds and byte-compares every artifact they produce.
//
// Usage: acceptance [--criterion K] [--out DIR]
// Exit status 0 iff every selected criterion passes.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ising/detect.hpp"
#include "ising/graphs.hpp"
#include "ising/model.hpp"
#include "ising/oracle.hpp"
#include "ising/risk.hpp"
#include "ising/rng.hpp"
#include "ising/signals.hpp"
#include "ising/util.hpp"

namespace fs = std::filesystem;
using namespace ising;

namespace {

// Pinned seeds: one per stochastic criterion, never changed after the fact.
constexpr std::uint64_t kSeedSampler = 101;      // criterion 1
constexpr std::uint64_t kSeedTypeOne = 202;      // criterion 2
constexpr std::uint64_t kSeedPower = 303;        // criterion 3
constexpr std::uint64_t kSeedInequalities = 505; // criterion 5
constexpr std::uint64_t kSeedCritical = 707;     // criterion 7
constexpr std::uint64_t kSeedCrossCheck = 909;   // criterion 9

// estimate_risk results are independent of the thread count by construction,
// so a fixed value here cannot affect byte-level determinism.
constexpr int kThreads = 4;

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

std::string num(double x) { return format_double(x); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("acceptance: cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------- criterion 1
// Glauber pair moments vs exact enumeration: complete graph n=10 (mean-field
// couplings), beta in {0.5, 1, 1.5}, zero field, one million sweeps after the
// default burn-in. Every E[X_i X_j] must match enumeration within 0.01.
CriterionResult criterion1(const std::string& outdir) {
  const std::int64_t n = 10;
  const std::int64_t sweeps = 1'000'000;
  const double tol = 0.01;
  const double betas[] = {0.5, 1.0, 1.5};
  auto coupling = coupling_from_graph(build_complete(n), Scaling::MeanField);

  double worst = 0.0;
  std::ostringstream rows;
  for (int bi = 0; bi < 3; ++bi) {
    ModelParams params{betas[bi], coupling, {}};
    auto exact = moments(params);

    SamplerConfig cfg;
    cfg.num_samples = sweeps;
    cfg.thinning = 1;
    cfg.burn_in = -1;  // family default
    cfg.seed = derive_seed(kSeedSampler, static_cast<std::uint64_t>(bi), 0);
    auto samples = glauber_sample(params, cfg);

    // Pair sums of +-1 products are integers, so the accumulation is exact.
    std::vector<std::int64_t> pair_sum(static_cast<std::size_t>(n * n), 0);
    int spin[10];
    for (const auto& x : samples) {
      for (std::int64_t i = 0; i < n; ++i) spin[i] = x.get(i);
      for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = i + 1; j < n; ++j)
          pair_sum[static_cast<std::size_t>(i * n + j)] += spin[i] * spin[j];
    }
    double max_dev = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = i + 1; j < n; ++j) {
        double mc = static_cast<double>(pair_sum[static_cast<std::size_t>(i * n + j)]) /
                    static_cast<double>(sweeps);
        max_dev = std::max(max_dev, std::abs(mc - exact.pair_moment(i, j)));
      }
    worst = std::max(worst, max_dev);
    if (bi) rows << ",";
    rows << "{\"beta\":" << num(betas[bi]) << ",\"max_abs_deviation\":" << num(max_dev) << "}";
  }

  CriterionResult res;
  res.pass = worst <= tol;
  res.detail = "max pair-moment deviation " + num(worst) + (res.pass ? " <= " : " > ") +
               num(tol) + " over beta {0.5, 1, 1.5}, 1e6 sweeps, n=10";
  write_file(outdir + "/criterion_1.json",
             "{\"criterion\":1,\"n\":10,\"sweeps\":1000000,\"tolerance\":" + num(tol) +
                 ",\"seed\":" + std::to_string(kSeedSampler) + ",\"per_beta\":[" + rows.str() +
                 "],\"max_abs_deviation\":" + num(worst) +
                 ",\"pass\":" + (res.pass ? "true" : "false") + "}\n");
  return res;
}

// ---------------------------------------------------------------- criterion 2
// Type-I control of the conditional scan at simulation scale: complete graph
// n=2000, beta=0.5, 50 disjoint sets of size ceil(4 log n)=31, delta=0.1.
// Empirical type I over 500 null replicates must be at most 0.05.
CriterionResult criterion2(const std::string& outdir) {
  const std::int64_t n = 2000;
  const double beta = 0.5;
  const std::int64_t count = 50;
  const auto s = static_cast<std::int64_t>(std::ceil(4.0 * std::log(static_cast<double>(n))));
  const double delta = 0.1;
  const std::int64_t replicates = 500;

  auto coupling = coupling_from_graph(build_complete(n), Scaling::MeanField);
  auto cls = make_mean_field_class(n, s, count, /*disjoint=*/true);
  ModelParams params{beta, coupling, {}};

  SamplerConfig cfg;
  cfg.num_samples = 1;
  cfg.thinning = 1;
  cfg.burn_in = -1;  // default: 200 * ceil(log n) sweeps at beta < 1

  std::int64_t rejections = 0;
  double threshold = 0.0;
  for (std::int64_t r = 0; r < replicates; ++r) {
    cfg.seed = derive_seed(kSeedTypeOne, 0, static_cast<std::uint64_t>(r));
    auto x = glauber_sample(params, cfg).front();
    auto scan = conditional_scan(x, beta, coupling, cls, delta);
    threshold = scan.threshold;
    if (scan.reject) ++rejections;
  }
  double type1 = static_cast<double>(rejections) / static_cast<double>(replicates);

  CriterionResult res;
  res.pass = type1 <= 0.05;
  res.detail = "conditional-scan type I " + num(type1) + (res.pass ? " <= " : " > ") +
               "0.05 over 500 null replicates (n=2000, s=" + std::to_string(s) +
               ", 50 sets, threshold " + num(threshold) + ")";
  write_file(outdir + "/criterion_2.json",
             "{\"criterion\":2,\"n\":2000,\"beta\":0.5,\"s\":" + std::to_string(s) +
                 ",\"class_count\":50,\"delta\":0.1,\"replicates\":500,\"seed\":" +
                 std::to_string(kSeedTypeOne) + ",\"threshold\":" + num(threshold) +
                 ",\"rejections\":" + std::to_string(rejections) + ",\"type1\":" + num(type1) +
                 ",\"pass\":" + (res.pass ? "true" : "false") + "}\n");
  return res;
}

// ---------------------------------------------------------------- criterion 3
// Power above the boundary in the same cell: tanh(A) = 4 sqrt(log n / s)
// (capped at 1 by field_from_tanh). Both the conditional scan and the naive
// scan (eta = beta = 0.5) must reach risk <= 0.1 over 500 replicates per arm.
CriterionResult criterion3(const std::string& outdir) {
  const std::int64_t n = 2000;
  const double beta = 0.5;
  const std::int64_t count = 50;
  const auto s = static_cast<std::int64_t>(std::ceil(4.0 * std::log(static_cast<double>(n))));
  const double delta = 0.1;
  const std::int64_t replicates = 500;

  GraphSpec spec;
  spec.family = GraphFamily::Complete;
  spec.n = n;
  auto coupling = coupling_from_graph(build_graph(spec), Scaling::MeanField);
  auto cls = make_mean_field_class(n, s, count, /*disjoint=*/true);

  const double tanh_target = 4.0 * std::sqrt(std::log(static_cast<double>(n)) /
                                             static_cast<double>(s));
  const double A = field_from_tanh(tanh_target);

  NullModel null_model{beta, coupling};
  AlternativeSpec alt{cls, A};
  SamplerConfig cfg;
  cfg.num_samples = 1;
  cfg.thinning = 1;
  cfg.burn_in = -1;

  TestSpec cond;
  cond.kind = TestKind::ConditionalScan;
  cond.delta = delta;
  TestSpec naive;
  naive.kind = TestKind::NaiveScan;
  naive.delta = delta;
  naive.eta = 0.5;

  auto r_cond = estimate_risk(cond, null_model, alt, replicates, cfg, kSeedPower,
                              /*cell_id=*/1, /*exhaustive_type2=*/false, kThreads);
  auto r_naive = estimate_risk(naive, null_model, alt, replicates, cfg, kSeedPower,
                               /*cell_id=*/2, /*exhaustive_type2=*/false, kThreads);

  // Structural headroom of the conditional scan in this cell: the statistic
  // cannot exceed sqrt(s) * (1 + tanh(beta * ||Q||_inf)) for any data.
  const double cond_threshold =
      2.0 * (1.0 + beta * coupling.inf_norm) *
      std::sqrt(2.0 * (1.0 + delta) * std::log(static_cast<double>(count)));
  const double cond_max_statistic = std::sqrt(static_cast<double>(s)) *
                                    (1.0 + std::tanh(beta * coupling.inf_norm));

  CriterionResult res;
  const bool cond_ok = r_cond.risk <= 0.1;
  const bool naive_ok = r_naive.risk <= 0.1;
  res.pass = cond_ok && naive_ok;
  res.detail = "conditional risk " + num(r_cond.risk) + (cond_ok ? " <= 0.1" : " > 0.1") +
               " [type I " + num(r_cond.type1) + ", type II " + num(r_cond.type2) +
               "; threshold " + num(cond_threshold) + " vs max attainable statistic " +
               num(cond_max_statistic) + "]; naive risk " + num(r_naive.risk) +
               (naive_ok ? " <= 0.1" : " > 0.1") + " [type I " + num(r_naive.type1) +
               ", type II " + num(r_naive.type2) + "]";

  auto record = [&](const char* name, const RiskEstimate& est) {
    return std::string("{\"test\":\"") + name + "\",\"type1\":" + num(est.type1) +
           ",\"type1_se\":" + num(est.type1_se) + ",\"type2\":" + num(est.type2) +
           ",\"type2_se\":" + num(est.type2_se) + ",\"risk\":" + num(est.risk) + "}";
  };
  write_file(outdir + "/criterion_3.json",
             "{\"criterion\":3,\"n\":2000,\"beta\":0.5,\"s\":" + std::to_string(s) +
                 ",\"class_count\":50,\"delta\":0.1,\"eta\":0.5,\"tanh_target\":" +
                 num(tanh_target) + ",\"A\":" + num(A) + ",\"replicates\":500,\"seed\":" +
                 std::to_string(kSeedPower) + ",\"conditional_threshold\":" +
                 num(cond_threshold) + ",\"conditional_max_statistic\":" +
                 num(cond_max_statistic) + ",\"results\":[" +
                 record("conditional_scan", r_cond) + "," + record("naive_scan", r_naive) +
                 "],\"pass\":" + (res.pass ? "true" : "false") + "}\n");

  // Mirror both cells in the sweep CSV schema so the determinism criterion
  // also covers a CSV artifact.
  auto make_record = [&](const TestSpec& t, const RiskEstimate& est, std::int64_t cell) {
    RiskRecord rec;
    rec.graph_id = spec.id();
    rec.n = n;
    rec.beta = beta;
    rec.s = s;
    rec.A = A;
    rec.tanh_A = std::tanh(A);
    rec.test = test_kind_name(t.kind);
    rec.estimate = est;
    rec.seed = kSeedPower;
    rec.cell_id = cell;
    return rec;
  };
  std::ostringstream csv;
  csv << kRiskCsvHeader << "\n"
      << make_record(cond, r_cond, 1).csv_row() << "\n"
      << make_record(naive, r_naive, 2).csv_row() << "\n";
  write_file(outdir + "/criterion_3.csv", csv.str());
  return res;
}

// ---------------------------------------------------------------- criterion 4
// Mixture likelihood-ratio second moment on the 12-cycle (raw couplings),
// two disjoint arcs of size 3, beta=0.4: E0[L^2] <= 1.05 at
// tanh(A) = 0.1 sqrt(log n / s), and nondecreasing along an A-grid to 1e-10.
CriterionResult criterion4(const std::string& outdir) {
  const std::int64_t n = 12;
  const double beta = 0.4;
  auto coupling = coupling_from_graph(build_regular_circulant(n, 2), Scaling::Raw);
  ModelParams null_params{beta, coupling, {}};
  const std::vector<std::vector<std::int32_t>> sets = {{0, 1, 2}, {6, 7, 8}};

  const double tanh_target = 0.1 * std::sqrt(std::log(static_cast<double>(n)) / 3.0);
  const double A_star = field_from_tanh(tanh_target);
  auto at_star = second_moment_mixture(null_params, sets, 3, A_star, SecondMomentMode::FiniteA);

  double min_increment = 0.0;
  double prev = 0.0;
  std::ostringstream grid_json;
  for (int gi = 0; gi <= 15; ++gi) {
    const double A = 0.02 * gi;
    auto rep = second_moment_mixture(null_params, sets, 3, A, SecondMomentMode::FiniteA);
    if (gi) {
      min_increment = std::min(min_increment, rep.value - prev);
      grid_json << ",";
    }
    grid_json << num(rep.value);
    prev = rep.value;
  }

  CriterionResult res;
  const bool small_ok = at_star.value <= 1.05;
  const bool monotone = min_increment >= -1e-10;
  res.pass = small_ok && monotone;
  res.detail = "E0[L^2] = " + num(at_star.value) + (small_ok ? " <= 1.05" : " > 1.05") +
               " at A=" + num(A_star) + "; min grid increment " + num(min_increment) +
               (monotone ? " >= -1e-10" : " < -1e-10") + " over 16 A-values";
  write_file(outdir + "/criterion_4.json",
             "{\"criterion\":4,\"n\":12,\"beta\":0.4,\"sets\":[[0,1,2],[6,7,8]],"
             "\"tanh_target\":" + num(tanh_target) + ",\"A\":" + num(A_star) +
                 ",\"second_moment\":" + num(at_star.value) + ",\"grid_step\":0.02," +
                 "\"grid_values\":[" + grid_json.str() + "],\"min_grid_increment\":" +
                 num(min_increment) + ",\"pass\":" + (res.pass ? "true" : "false") + "}\n");
  return res;
}

// ---------------------------------------------------------------- criterion 5
// Correlation-inequality suite: 500 seeded random ferromagnetic instances
// (n <= 8) with zero violations at tolerance 1e-10 across all five checks.
CriterionResult criterion5(const std::string& outdir) {
  auto report = verify_inequalities(500, kSeedInequalities, 1e-10);
  double max_violation = 0.0;
  for (const auto* stats : {&report.nonneg_cov, &report.nonneg_mean, &report.field_ordering,
                            &report.coupling_growth, &report.mean_vs_field})
    max_violation = std::max(max_violation, stats->max_violation);

  CriterionResult res;
  res.pass = !report.any_violation && report.total_violations() == 0;
  res.detail = "500 instances, " + std::to_string(report.total_violations()) +
               " violations at tol 1e-10 (largest raw excess " + num(max_violation) + ")";
  write_file(outdir + "/criterion_5.json", report.to_json() + "\n");
  return res;
}

// ---------------------------------------------------------------- criterion 6
// Exact chain correlations: free-boundary chain n=14, E[X_i X_j] from
// enumeration equals (tanh beta)^{|i-j|} to 1e-12 for beta in {0.3, 0.6, 0.9}.
CriterionResult criterion6(const std::string& outdir) {
  const std::int64_t n = 14;
  const double betas[] = {0.3, 0.6, 0.9};
  double worst = 0.0;
  std::ostringstream rows;
  for (int bi = 0; bi < 3; ++bi) {
    auto corr = chain_correlation(n, betas[bi]);
    const double t = std::tanh(betas[bi]);
    double max_dev = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        double closed = std::pow(t, std::abs(static_cast<double>(i - j)));
        max_dev = std::max(max_dev, std::abs(corr[static_cast<std::size_t>(i * n + j)] - closed));
      }
    worst = std::max(worst, max_dev);
    if (bi) rows << ",";
    rows << "{\"beta\":" << num(betas[bi]) << ",\"max_abs_deviation\":" << num(max_dev) << "}";
  }

  CriterionResult res;
  res.pass = worst <= 1e-12;
  res.detail = "max |pair correlation - (tanh beta)^{|i-j|}| = " + num(worst) +
               (res.pass ? " <= 1e-12" : " > 1e-12") + " on the n=14 chain";
  write_file(outdir + "/criterion_6.json",
             "{\"criterion\":6,\"n\":14,\"tolerance\":1e-12,\"per_beta\":[" + rows.str() +
                 "],\"max_abs_deviation\":" + num(worst) +
                 ",\"pass\":" + (res.pass ? "true" : "false") + "}\n");
  return res;
}

// ---------------------------------------------------------------- criterion 7
// Critical magnetization test: complete graph n=4096 at beta=1, cutoff
// calibrated to the empirical 0.95 null quantile from 2000 replicates.
// Burn-in is overridden to 1000 sweeps: critical mean-field Glauber mixes in
// O(sqrt(n)) = 64 sweeps, the beta >= 1 default of 2000*ceil(log n) = 18000
// sweeps would cost 18x the runtime for no accuracy gain, and calibration and
// the fresh-rate check share the burn-in so residual bias cancels from the
// rate. Fresh null rejection rate must be 0.05 +- 0.02 and power at s=256,
// A=0.25 (so s*A = 8 n^{1/4}) at least 0.8.
CriterionResult criterion7(const std::string& outdir) {
  const std::int64_t n = 4096;
  const double beta = 1.0;
  const std::int64_t s = 256;
  const double A = 0.25;
  auto coupling = coupling_from_graph(build_complete(n), Scaling::MeanField);
  NullModel null_model{beta, coupling};

  SamplerConfig cfg;
  cfg.num_samples = 1;
  cfg.thinning = 1;
  cfg.burn_in = 1000;

  const double cutoff =
      calibrate_magnetization_cutoff(null_model, 2000, 0.95, cfg, kSeedCritical, /*cell_id=*/1);

  auto cls = make_mean_field_class(n, s, 1, /*disjoint=*/true);
  TestSpec spec;
  spec.kind = TestKind::Magnetization;
  spec.cutoff_mode = MagnetizationCutoff::Calibrated;
  spec.cutoff_param = cutoff;

  auto est = estimate_risk(spec, null_model, {cls, A}, 500, cfg, kSeedCritical,
                           /*cell_id=*/2, /*exhaustive_type2=*/false, kThreads);
  const double null_rate = est.type1;
  const double power = 1.0 - est.type2;

  CriterionResult res;
  const bool null_ok = null_rate >= 0.03 && null_rate <= 0.07;
  const bool power_ok = power >= 0.8;
  res.pass = null_ok && power_ok;
  res.detail = "null rate " + num(null_rate) + (null_ok ? " in" : " outside") +
               " [0.03, 0.07]; power " + num(power) + (power_ok ? " >= 0.8" : " < 0.8") +
               " (calibrated cutoff " + num(cutoff) + ", k_n " + num(k_n_scale(n, s, A)) + ")";
  write_file(outdir + "/criterion_7.json",
             "{\"criterion\":7,\"n\":4096,\"beta\":1,\"s\":256,\"A\":0.25,"
             "\"burn_in_sweeps\":3000,\"calibration_replicates\":2000,\"quantile\":0.95,"
             "\"seed\":" + std::to_string(kSeedCritical) + ",\"cutoff\":" + num(cutoff) +
                 ",\"k_n\":" + num(k_n_scale(n, s, A)) + ",\"replicates\":500," +
                 "\"null_rate\":" + num(null_rate) + ",\"null_rate_se\":" + num(est.type1_se) +
                 ",\"power\":" + num(power) + ",\"power_se\":" + num(est.type2_se) +
                 ",\"pass\":" + (res.pass ? "true" : "false") + "}\n");
  return res;
}

// ---------------------------------------------------------------- criterion 8
// Small-set marginal uniformity: complete graph, beta=0.5, s=2. The exact
// sup over (S, a) of |2^s P(X_S = a) - 1| must decrease strictly along
// n in {8, 12, 16, 20} and drop by at least a factor 1.5 from n=8 to n=20.
CriterionResult criterion8(const std::string& outdir) {
  const std::int64_t ns[] = {8, 12, 16, 20};
  std::vector<double> devs;
  for (std::int64_t n : ns) {
    auto coupling = coupling_from_graph(build_complete(n), Scaling::MeanField);
    ModelParams params{0.5, coupling, {}};
    devs.push_back(small_marginal_deviation(params, 2).deviation);
  }
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < devs.size(); ++i)
    if (!(devs[i + 1] < devs[i])) decreasing = false;
  const double ratio = devs.front() / devs.back();

  CriterionResult res;
  const bool ratio_ok = devs.back() * 1.5 <= devs.front();
  res.pass = decreasing && ratio_ok;
  res.detail = "deviations " + num(devs[0]) + " > " + num(devs[1]) + " > " + num(devs[2]) +
               " > " + num(devs[3]) + (decreasing ? " strictly decreasing" : " NOT decreasing") +
               "; n=8 / n=20 ratio " + num(ratio) + (ratio_ok ? " >= 1.5" : " < 1.5");
  write_file(outdir + "/criterion_8.json",
             "{\"criterion\":8,\"beta\":0.5,\"s\":2,\"n_values\":[8,12,16,20],"
             "\"deviations\":[" + num(devs[0]) + "," + num(devs[1]) + "," + num(devs[2]) + "," +
                 num(devs[3]) + "],\"ratio_first_to_last\":" + num(ratio) +
                 ",\"pass\":" + (res.pass ? "true" : "false") + "}\n");
  return res;
}

// ---------------------------------------------------------------- criterion 9
// Monte-Carlo vs exact risk at n=12 for every test kind: the MC estimate over
// 2000 replicates (exact inverse-CDF sampling at this size) must agree with
// the exactly summed risk within 3 standard errors, where the SE is computed
// from the exact arm probabilities (so degenerate arms demand equality).
CriterionResult criterion9(const std::string& outdir) {
  const std::int64_t n = 12;
  const double beta = 0.5;
  const double A = 0.8;
  const std::int64_t replicates = 2000;
  auto coupling = coupling_from_graph(build_complete(n), Scaling::MeanField);
  NullModel null_model{beta, coupling};
  ModelParams null_params{beta, coupling, {}};
  auto cls = make_mean_field_class(n, 3, 3, /*disjoint=*/true);
  AlternativeSpec alt{cls, A};

  // Exact 0.95 null quantile of the statistic n^{1/4} * mean spin. The
  // statistic depends on the state only through the number of +1 spins.
  auto dist = exact_distribution(null_params);
  std::vector<double> mass(static_cast<std::size_t>(n + 1), 0.0);
  for (std::uint64_t state = 0; state < (1ULL << n); ++state)
    mass[std::popcount(state)] += dist.prob[state];
  const double root4 = std::pow(static_cast<double>(n), 0.25);
  double cum = 0.0;
  double cutoff = root4;  // fallback: the largest attainable value
  for (std::int64_t k = 0; k <= n; ++k) {
    cum += mass[static_cast<std::size_t>(k)];
    if (cum >= 0.95) {
      cutoff = root4 * static_cast<double>(2 * k - n) / static_cast<double>(n);
      break;
    }
  }

  TestSpec cond;
  cond.kind = TestKind::ConditionalScan;
  cond.delta = 0.2;
  TestSpec naive;
  naive.kind = TestKind::NaiveScan;
  naive.delta = 0.2;
  naive.eta = 0.5;
  TestSpec mag;
  mag.kind = TestKind::Magnetization;
  mag.cutoff_mode = MagnetizationCutoff::Calibrated;
  mag.cutoff_param = cutoff;

  SamplerConfig cfg;  // n <= 20: the exact sampler is used regardless
  cfg.num_samples = 1;

  const TestSpec* specs[] = {&cond, &naive, &mag};
  bool all_ok = true;
  double worst_sigmas = 0.0;
  std::ostringstream rows;
  for (int ti = 0; ti < 3; ++ti) {
    auto mc = estimate_risk(*specs[ti], null_model, alt, replicates, cfg, kSeedCrossCheck,
                            /*cell_id=*/ti + 1, /*exhaustive_type2=*/true, kThreads);
    auto ex = exact_risk(*specs[ti], null_model, alt, /*exhaustive_type2=*/true);
    const double se1 = std::sqrt(ex.type1 * (1.0 - ex.type1) / static_cast<double>(replicates));
    const double se2 = std::sqrt(ex.type2 * (1.0 - ex.type2) / static_cast<double>(replicates));
    const double se_risk = std::sqrt(se1 * se1 + se2 * se2);
    const bool ok1 = std::abs(mc.type1 - ex.type1) <= 3.0 * se1;
    const bool ok2 = std::abs(mc.type2 - ex.type2) <= 3.0 * se2;
    const bool okr = std::abs(mc.risk - ex.risk) <= 3.0 * se_risk;
    if (!(ok1 && ok2 && okr)) all_ok = false;
    if (se_risk > 0.0)
      worst_sigmas = std::max(worst_sigmas, std::abs(mc.risk - ex.risk) / se_risk);
    if (ti) rows << ",";
    rows << "{\"test\":\"" << test_kind_name(specs[ti]->kind) << "\",\"mc_type1\":"
         << num(mc.type1) << ",\"exact_type1\":" << num(ex.type1) << ",\"mc_type2\":"
         << num(mc.type2) << ",\"exact_type2\":" << num(ex.type2) << ",\"mc_risk\":"
         << num(mc.risk) << ",\"exact_risk\":" << num(ex.risk) << ",\"risk_se\":"
         << num(se_risk) << ",\"agree\":" << ((ok1 && ok2 && okr) ? "true" : "false") << "}";
  }

  CriterionResult res;
  res.pass = all_ok;
  res.detail = std::string(all_ok ? "all 3 test kinds" : "NOT all test kinds") +
               " within 3 SE of exact risk (worst |risk diff| = " + num(worst_sigmas) +
               " SE; magnetization cutoff " + num(cutoff) + ")";
  write_file(outdir + "/criterion_9.json",
             "{\"criterion\":9,\"n\":12,\"beta\":0.5,\"s\":3,\"class_count\":3,\"A\":0.8,"
             "\"replicates\":2000,\"seed\":" + std::to_string(kSeedCrossCheck) +
                 ",\"magnetization_cutoff\":" + num(cutoff) + ",\"results\":[" + rows.str() +
                 "],\"pass\":" + (all_ok ? "true" : "false") + "}\n");
  return res;
}

CriterionResult run_one(int k, const std::string& outdir);

// --------------------------------------------------------------- criterion 10
// Determinism: run criteria 1-9 twice into separate directories with the same
// pinned seeds; every artifact file must come back byte-identical.
CriterionResult criterion10(const std::string& outdir) {
  const std::string dir_a = outdir + "/rerun_a";
  const std::string dir_b = outdir + "/rerun_b";
  // Start from clean directories so an interrupted earlier run cannot leave a
  // stale artifact on one side of the comparison.
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);

  std::vector<std::string> problems;
  for (int k = 1; k <= 9; ++k) {
    try {
      run_one(k, dir_a);
      run_one(k, dir_b);
    } catch (const std::exception& e) {
      problems.push_back("criterion " + std::to_string(k) + " threw: " + e.what());
    }
  }

  // Compare the full artifact sets, not just known names.
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir_a))
    if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  std::int64_t compared = 0;
  for (const auto& name : names) {
    const std::string a = read_file(dir_a + "/" + name);
    const std::string b = read_file(dir_b + "/" + name);
    ++compared;
    if (a.empty() || a != b) problems.push_back(name + " differs between reruns");
  }
  for (const auto& entry : fs::directory_iterator(dir_b)) {
    const std::string name = entry.path().filename().string();
    if (!std::binary_search(names.begin(), names.end(), name))
      problems.push_back(name + " produced by only one rerun");
  }

  CriterionResult res;
  res.pass = problems.empty() && compared > 0;
  std::ostringstream detail;
  if (res.pass) {
    detail << "criteria 1-9 re-run twice: all " << compared << " artifacts byte-identical";
  } else {
    detail << problems.size() << " problems:";
    for (const auto& p : problems) detail << " [" << p << "]";
  }
  res.detail = detail.str();

  std::ostringstream artifact;
  artifact << "{\"criterion\":10,\"artifacts_compared\":" << compared << ",\"problems\":[";
  for (std::size_t i = 0; i < problems.size(); ++i)
    artifact << (i ? "," : "") << "\"" << problems[i] << "\"";
  artifact << "],\"pass\":" << (res.pass ? "true" : "false") << "}\n";
  write_file(outdir + "/criterion_10.json", artifact.str());
  return res;
}

CriterionResult run_one(int k, const std::string& outdir) {
  fs::create_directories(outdir);
  switch (k) {
    case 1: return criterion1(outdir);
    case 2: return criterion2(outdir);
    case 3: return criterion3(outdir);
    case 4: return criterion4(outdir);
    case 5: return criterion5(outdir);
    case 6: return criterion6(outdir);
    case 7: return criterion7(outdir);
    case 8: return criterion8(outdir);
    case 9: return criterion9(outdir);
    case 10: return criterion10(outdir);
    default: throw std::invalid_argument("acceptance: criterion must be 1..10");
  }
}

}  // namespace

int main(int argc, char** argv) {
  int which = 0;  // 0 = run all ten
  std::string outdir = "acceptance_out";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      which = std::atoi(argv[++i]);
    } else if (arg == "--out" && i + 1 < argc) {
      outdir = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--criterion K] [--out DIR]\n";
      return 2;
    }
  }

  std::vector<int> todo;
  if (which == 0)
    for (int k = 1; k <= 10; ++k) todo.push_back(k);
  else
    todo.push_back(which);

  bool all_pass = true;
  for (int k : todo) {
    CriterionResult res;
    try {
      res = run_one(k, outdir);
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    std::cout << "criterion " << k << ": " << (res.pass ? "PASS" : "FAIL") << " ("
              << res.detail << ")" << std::endl;
    if (!res.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
