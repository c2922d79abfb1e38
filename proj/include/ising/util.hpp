// Small numeric helpers shared across modules: compensated summation,
// streaming log-sum-exp, order-statistic quantiles, float formatting.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ising {

// Kahan–Neumaier compensated accumulator.  Used wherever a statistic sums
// many terms (spec requires compensation for |S| > 1e4; it is cheap enough to
// use unconditionally).
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Streaming log(sum(exp(x_k))) that never materializes the terms: maintains a
// running maximum and rescales the partial sum when the maximum moves.
class OnlineLogSumExp {
 public:
  void add(double log_term) {
    if (count_ == 0 || log_term > max_) {
      if (count_ > 0) sum_ *= std::exp(max_ - log_term);
      max_ = log_term;
    }
    sum_ += std::exp(log_term - max_);
    ++count_;
  }
  double value() const {
    if (count_ == 0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }
  std::int64_t count() const { return count_; }

 private:
  double max_ = 0.0;
  double sum_ = 0.0;
  std::int64_t count_ = 0;
};

// Empirical quantile as the ⌈q·N⌉-th order statistic (1-based), i.e. the
// smallest sample value v with  #{x_i ≤ v} ≥ q·N.  `sorted` must be ascending.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  if (rank == 0) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

// Shortest round-trip decimal representation (std::to_chars); deterministic
// and exact, used for all CSV/JSON number output so reruns are byte-identical.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double binomial_se(double p_hat, std::int64_t n) {
  if (n <= 0) return 0.0;
  return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(n));
}

}  // namespace ising
