// The Ising measure  P(x) ∝ exp((β/2)·xᵀQx + μᵀx)  on {−1,+1}ⁿ: spin
// configurations, local fields m_i = Σ_j Q_ij x_j, heat-bath (Glauber)
// dynamics, and exact enumeration for n ≤ 20.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ising/graphs.hpp"
#include "ising/rng.hpp"

namespace ising {

inline constexpr std::int64_t kExactEnumerationCap = 20;

// One element of {−1,+1}ⁿ, bit-packed (set bit ⇒ +1).
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::int64_t n, int fill = -1);  // fill ∈ {−1,+1}
  static SpinConfig from_vector(const std::vector<int>& spins);
  static SpinConfig from_bits(std::int64_t n, std::uint64_t bits);  // n ≤ 64

  std::int64_t size() const { return n_; }
  int get(std::int64_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1 ? +1 : -1;
  }
  void set(std::int64_t i, int spin);
  std::vector<int> to_vector() const;
  std::int64_t sum() const;             // Σ x_i
  double mean() const;                  // X̄
  std::uint64_t bits() const;           // n ≤ 64 only

  // Hex encoding of the packed little-endian bit string (2 chars per byte).
  std::string to_hex() const;
  static SpinConfig from_hex(std::int64_t n, const std::string& hex);

  bool operator==(const SpinConfig& o) const { return n_ == o.n_ && words_ == o.words_; }

 private:
  std::int64_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ModelParams {
  double beta = 0.0;
  CouplingMatrix coupling;
  std::vector<double> field;  // μ; empty means zero

  std::int64_t n() const { return coupling.n; }
  double mu(std::int64_t i) const { return field.empty() ? 0.0 : field[i]; }
  bool ferromagnetic() const;  // β ≥ 0 and Q ≥ 0 (Q is nonnegative by type)
  void validate() const;
};

// Local fields m_i = Σ_j Q_ij x_j with cached mean.
struct LocalFields {
  std::vector<double> m;
  double mean() const;
};

LocalFields local_fields(const CouplingMatrix& coupling, const SpinConfig& config);

// Local fields for a subset of sites only (complete-uniform couplings get the
// O(1)-per-site total-magnetization path).
std::vector<double> local_fields_for_sites(const CouplingMatrix& coupling,
                                           const SpinConfig& config,
                                           const std::vector<std::int32_t>& sites);

// P(X_i = +1 | rest) = (1 + tanh(β·m_i + μ_i)) / 2, clamped to the open unit
// interval when tanh saturates in double precision.
double conditional_prob_plus(double beta, double m_i, double mu_i);

// (β/2)·xᵀQx + μᵀx, accumulated over the edge list.
double log_weight(const ModelParams& params, const SpinConfig& config);

// One heat-bath update at site i driven by the uniform variate u: spin i
// becomes +1 iff u < conditional_prob_plus.  Fields are updated incrementally
// over the neighbors of i.
void glauber_step(const ModelParams& params, SpinConfig& config, LocalFields& fields,
                  std::int64_t i, double u);

enum class InitState { AllPlus, AllMinus, UniformRandom };

struct SamplerConfig {
  std::int64_t burn_in = -1;   // sweeps; -1 = default 200·⌈log n⌉ (β<1) / 2000·⌈log n⌉ (β≥1)
  std::int64_t thinning = 1;   // sweeps between retained samples
  std::int64_t num_samples = 1;
  std::uint64_t seed = 0;
  InitState init = InitState::UniformRandom;
  // When set, retained samples are conditioned on {X̄ ≥ 0}: a candidate with
  // X̄ < 0 is discarded and the chain runs more thinning sweeps instead.
  bool condition_nonneg_mag = false;

  std::int64_t resolved_burn_in(double beta, std::int64_t n) const;
  void validate() const;
};

// Systematic-scan Glauber sampler (one sweep = sites 0..n−1 in order).
// Deterministic given the seed; exactly one uniform is consumed per site
// update in every code path.
std::vector<SpinConfig> glauber_sample(const ModelParams& params, const SamplerConfig& cfg);

// Full 2ⁿ table of the measure (n ≤ 20).  prob[k] is the probability of the
// configuration whose bit pattern is k (bit i set ⇒ x_i = +1).
struct ExactDistribution {
  std::int64_t n = 0;
  std::vector<double> prob;
  double log_Z = 0.0;
};

ExactDistribution exact_distribution(const ModelParams& params);

// i.i.d. inverse-CDF draws from the exact table.
std::vector<SpinConfig> exact_sample(const ModelParams& params, std::int64_t count,
                                     std::uint64_t seed);
// Same, reusing a prebuilt table (callers doing many replicates).
std::vector<SpinConfig> exact_sample(const ExactDistribution& dist, std::int64_t count,
                                     std::uint64_t seed);

// μ_S(eta): eta on S, zero elsewhere.
std::vector<double> field_vector(std::int64_t n, const std::vector<std::int32_t>& S,
                                 double eta);

// Sample dump: header "n num_samples seed", then one hex bitstring per line.
void save_samples(const std::vector<SpinConfig>& samples, std::int64_t n,
                  std::uint64_t seed, const std::string& path);
std::vector<SpinConfig> load_samples(const std::string& path);

}  // namespace ising
