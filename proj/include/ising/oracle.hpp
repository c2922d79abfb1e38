// Exact small-n computations used as ground truth throughout the project:
// partition functions, (conditional) moments, mean-field fixed points,
// likelihood-ratio second moments for set-mixture alternatives, chain
// correlations, correlation-inequality verification, and small-set marginal
// uniformity. Everything here enumerates all 2^n states (n <= 20) in log
// space, so these routines back 1e-10 .. 1e-12 assertions elsewhere.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ising/model.hpp"

namespace ising {

enum class Conditioning { None, NonnegativeMagnetization };

struct PartitionValue {
  double log_Z = 0.0;
};

struct MomentTable {
  std::int64_t n = 0;
  Conditioning conditioning = Conditioning::None;
  std::vector<double> means;  // E X_i (conditional when requested)
  std::vector<double> cov;    // row-major n x n covariance matrix
  double cov_at(std::int64_t i, std::int64_t j) const { return cov[i * n + j]; }
  // E X_i X_j = Cov + E X_i E X_j (X_i^2 == 1 makes the diagonal exact)
  double pair_moment(std::int64_t i, std::int64_t j) const {
    return cov_at(i, j) + means[i] * means[j];
  }
};

enum class FixedPointRegime { High, Critical, Low };

// Nonnegative root t of t = tanh(beta*t + B), with phi(x) = x - tanh(beta*x + B).
struct FixedPoint {
  double t = 0.0;
  FixedPointRegime regime = FixedPointRegime::High;
  double phi_prime = 0.0;  // 1 - beta*(1 - tanh^2(beta*t + B))
};

enum class SecondMomentMode { FiniteA, LimitAInfinity };

// E0[L^2] for the uniform mixture over one-set alternatives {mu_S(A) : S in C'}.
// terms is a k x k matrix: diagonal entries are the per-set terms
// Z(0) Z(mu_S(2A)) / Z(mu_S(A))^2, off-diagonal entries the cross terms
// Z(0) Z(mu_{S1 u S2}(A)) / (Z(mu_{S1}(A)) Z(mu_{S2}(A))). value is their mean.
// In the A -> infinity limit the terms become 1/P0(X_S = 1) on the diagonal and
// P0(X_{S1 u S2} = 1) / (P0(X_{S1} = 1) P0(X_{S2} = 1)) off it.
struct SecondMomentReport {
  double value = 1.0;
  std::int64_t k = 0;               // number of sets
  std::vector<double> terms;        // row-major k x k decomposition
  double A = 0.0;                   // field strength used (FiniteA mode)
  SecondMomentMode mode = SecondMomentMode::FiniteA;
  std::string notes;                // commentary only, never asserted against
};

struct InequalityCheckStats {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  double max_violation = 0.0;  // largest positive excess beyond tolerance 0
};

// Randomized verification report for the four correlation inequalities:
// nonnegative covariances/means, covariance ordering under larger fields,
// covariance monotonicity in the couplings, and the mean-vs-field lower bound
// E X_i >= (1 - tanh(beta*||Q||_inf)) * tanh(mu_i).
struct InequalityReport {
  std::int64_t instances = 0;
  std::uint64_t base_seed = 0;
  double tol = 1e-10;
  InequalityCheckStats nonneg_cov;       // Cov(X_i, X_j) >= 0
  InequalityCheckStats nonneg_mean;      // E X_i >= 0
  InequalityCheckStats field_ordering;   // larger field => smaller covariances
  InequalityCheckStats coupling_growth;  // larger couplings => larger covariances
  InequalityCheckStats mean_vs_field;    // E X_i >= rho * tanh(mu_i)
  std::uint64_t first_violating_seed = 0;
  bool any_violation = false;
  std::int64_t total_violations() const;
  std::string to_json() const;
};

struct MarginalDeviation {
  double deviation = 0.0;      // sup over (S, a) of |P(X_S = a)/g(a) - 1|
  double mc_error = 0.0;       // max standard error of P-hat/g (sampled mode only)
  std::int64_t sets_checked = 0;
  bool conditioned = false;    // true when restricted to {mean spin >= 0}
  double tilt_t = 0.0;         // fixed-point tilt used for beta > 1, else 0
};

// Exact log partition function by streaming log-sum-exp over all (or the
// conditioned subset of) states. n <= 20.
PartitionValue partition_function(const ModelParams& params,
                                  Conditioning conditioning = Conditioning::None);

// Exact means and covariances via two-pass accumulation over the state table.
MomentTable moments(const ModelParams& params,
                    Conditioning conditioning = Conditioning::None);

// Bracketed bisection for the nonnegative root of t = tanh(beta*t + B); for
// beta > 1, B = 0 returns the strictly positive root. |phi(t)| <= 1e-12.
FixedPoint fixed_point(double beta, double B);

// params_null supplies (beta, Q); sets must be pairwise disjoint, each of
// size s. Mode FiniteA evaluates at field strength A; LimitAInfinity computes
// the dominated-convergence limit from ground-state event probabilities.
SecondMomentReport second_moment_mixture(const ModelParams& params_null,
                                         const std::vector<std::vector<std::int32_t>>& sets,
                                         std::int64_t s, double A, SecondMomentMode mode);

// Free-boundary chain with unit couplings, zero field: exact E X_i X_j for all
// pairs (row-major n x n). Asserts the closed form (tanh beta)^{|i-j|} to
// 1e-12 before returning. n <= 16.
std::vector<double> chain_correlation(std::int64_t n, double beta);

// Runs `instances` random ferromagnetic instances (n in {3..8}, edge
// probability 1/2, uniform[0,1] couplings, beta ~ U[0,2], fields in [0,2])
// through all four inequality checks at the given tolerance.
InequalityReport verify_inequalities(std::int64_t instances, std::uint64_t base_seed,
                                     double tol = 1e-10);

// Exact sup over size-s sets S and sign patterns a of |P(X_S = a)/g(a) - 1|,
// where g = 2^{-s} for beta <= 1 (unconditioned) and, for beta > 1, g is the
// product tilt exp(beta*t*sum a_i)/(2 cosh(beta*t))^s under conditioning on
// {mean spin >= 0}. Zero external field expected. For exchangeable couplings
// (uniform complete graph) one representative set suffices and is used.
MarginalDeviation small_marginal_deviation(const ModelParams& params, std::int64_t s);

// Monte-Carlo version for n beyond the enumeration cap: estimates the same
// deviation over the supplied sets from Glauber samples, with the standard
// error of the binding estimate reported as mc_error.
MarginalDeviation small_marginal_deviation_sampled(
    const ModelParams& params, std::int64_t s,
    const std::vector<std::vector<std::int32_t>>& sets, const SamplerConfig& sampler);

}  // namespace ising
