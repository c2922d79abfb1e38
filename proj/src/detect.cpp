#include "ising/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ising/oracle.hpp"
#include "ising/util.hpp"

namespace ising {

const char* test_kind_name(TestKind kind) {
  switch (kind) {
    case TestKind::ConditionalScan: return "conditional_scan";
    case TestKind::NaiveScan: return "naive_scan";
    case TestKind::Magnetization: return "magnetization";
  }
  return "unknown";
}

namespace {

void check_scan_inputs(const SpinConfig& x, const SignalClass& cls, double delta) {
  if (cls.sets.empty()) throw std::invalid_argument("scan test: empty class");
  if (cls.n != x.size()) throw std::invalid_argument("scan test: class/config size mismatch");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("scan test: delta must lie in (0,1)");
}

TestResult scan_over_class(TestKind kind, const SignalClass& cls, double threshold,
                           bool keep_per_set,
                           const std::vector<double>& set_stats) {
  TestResult r;
  r.kind = kind;
  r.threshold = threshold;
  for (std::int64_t k = 0; k < cls.count(); ++k) {
    double v = std::abs(set_stats[k]);
    if (r.argmax_set < 0 || v > r.statistic) {
      r.statistic = v;
      r.argmax_set = k;
    }
  }
  r.reject = r.statistic > r.threshold;
  if (keep_per_set) r.per_set = set_stats;
  return r;
}

}  // namespace

TestResult conditional_scan(const SpinConfig& x, double beta, const CouplingMatrix& coupling,
                            const SignalClass& cls, double delta, bool keep_per_set) {
  check_scan_inputs(x, cls, delta);
  if (coupling.n != x.size())
    throw std::invalid_argument("conditional_scan: coupling/config size mismatch");

  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(cls.s));
  std::vector<double> stats(cls.count());
  for (std::int64_t k = 0; k < cls.count(); ++k) {
    const auto& S = cls.sets[k];
    std::vector<double> m = local_fields_for_sites(coupling, x, S);
    KahanSum sum;
    for (std::size_t j = 0; j < S.size(); ++j)
      sum.add(x.get(S[j]) - std::tanh(beta * m[j]));
    stats[k] = sum.value() * inv_sqrt_s;
  }
  const double threshold = 2.0 * (1.0 + beta * coupling.inf_norm) *
                           std::sqrt(2.0 * (1.0 + delta) *
                                     std::log(static_cast<double>(cls.count())));
  return scan_over_class(TestKind::ConditionalScan, cls, threshold, keep_per_set, stats);
}

TestResult naive_scan(const SpinConfig& x, const SignalClass& cls, double delta, double eta,
                      bool keep_per_set) {
  check_scan_inputs(x, cls, delta);
  if (!(eta >= 0.0 && eta < 1.0))
    throw std::invalid_argument("naive_scan: eta must lie in [0,1) (eta < 1 is sharp)");

  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(cls.s));
  std::vector<double> stats(cls.count());
  for (std::int64_t k = 0; k < cls.count(); ++k) {
    KahanSum sum;
    for (auto i : cls.sets[k]) sum.add(x.get(i));
    stats[k] = sum.value() * inv_sqrt_s;
  }
  const double threshold = std::sqrt((1.0 + delta) *
                                     std::log(static_cast<double>(cls.count())) /
                                     (1.0 - eta));
  return scan_over_class(TestKind::NaiveScan, cls, threshold, keep_per_set, stats);
}

double k_n_scale(std::int64_t n, std::int64_t s, double A) {
  return std::cbrt(std::pow(static_cast<double>(n), -0.25) * static_cast<double>(s) * A);
}

TestResult magnetization_test(const SpinConfig& x, std::int64_t s, double A,
                              MagnetizationCutoff mode, double cutoff_param) {
  const std::int64_t n = x.size();
  if (n < 1) throw std::invalid_argument("magnetization_test: empty configuration");
  TestResult r;
  r.kind = TestKind::Magnetization;
  r.statistic = std::pow(static_cast<double>(n), 0.25) * x.mean();
  if (mode == MagnetizationCutoff::LemmaForm) {
    if (s < 1 || !(A > 0.0))
      throw std::invalid_argument("magnetization_test: lemma-form cutoff needs s >= 1, A > 0");
    r.threshold = cutoff_param * k_n_scale(n, s, A);
  } else {
    r.threshold = cutoff_param;
  }
  r.reject = r.statistic > r.threshold;  // one-sided: positive-field alternatives
  return r;
}

TestResult run_test(const TestSpec& spec, const SpinConfig& x, double beta,
                    const CouplingMatrix& coupling, const SignalClass& cls, double A) {
  switch (spec.kind) {
    case TestKind::ConditionalScan:
      return conditional_scan(x, beta, coupling, cls, spec.delta);
    case TestKind::NaiveScan:
      return naive_scan(x, cls, spec.delta, spec.eta);
    case TestKind::Magnetization:
      return magnetization_test(x, cls.s, A, spec.cutoff_mode, spec.cutoff_param);
  }
  throw std::logic_error("run_test: unknown test kind");
}

LocalFieldDeviation local_field_deviation(const std::vector<SpinConfig>& samples,
                                          const CouplingMatrix& coupling, double beta,
                                          double B) {
  if (samples.empty())
    throw std::invalid_argument("local_field_deviation: need at least one sample");
  LocalFieldDeviation out;
  out.t = fixed_point(beta, B).t;
  out.alpha_n = coupling.avg_degree > 0.0
                    ? std::sqrt(std::log(static_cast<double>(coupling.n)) /
                                coupling.avg_degree)
                    : 0.0;

  std::vector<double> stat;
  stat.reserve(samples.size());
  for (const auto& x : samples) {
    double worst = 0.0;
    if (coupling.is_complete_uniform) {
      // Only two local-field values exist: c(M-1) at plus spins, c(M+1) at minus.
      const double c = coupling.uniform_value;
      const std::int64_t M = x.sum();
      const std::int64_t plus = (M + coupling.n) / 2;
      if (plus > 0) worst = std::abs(c * static_cast<double>(M - 1) - out.t);
      if (plus < coupling.n)
        worst = std::max(worst, std::abs(c * static_cast<double>(M + 1) - out.t));
    } else {
      LocalFields f = local_fields(coupling, x);
      for (double m : f.m) worst = std::max(worst, std::abs(m - out.t));
    }
    stat.push_back(worst);
  }
  std::sort(stat.begin(), stat.end());
  out.q50 = quantile_sorted(stat, 0.5);
  out.q90 = quantile_sorted(stat, 0.9);
  out.q99 = quantile_sorted(stat, 0.99);
  return out;
}

}  // namespace ising
