#include "ising/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ising/util.hpp"

namespace ising {

// ----------------------------------------------------------------- SpinConfig

SpinConfig::SpinConfig(std::int64_t n, int fill) : n_(n), words_((n + 63) / 64, 0) {
  if (fill == +1) {
    for (auto& w : words_) w = ~0ULL;
    if (n_ % 64 != 0 && !words_.empty()) words_.back() &= (1ULL << (n_ % 64)) - 1;
  } else if (fill != -1) {
    throw std::invalid_argument("SpinConfig: fill must be +1 or -1");
  }
}

SpinConfig SpinConfig::from_vector(const std::vector<int>& spins) {
  SpinConfig c(static_cast<std::int64_t>(spins.size()), -1);
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] != 1 && spins[i] != -1)
      throw std::invalid_argument("SpinConfig: spins must be +1/-1");
    if (spins[i] == 1) c.set(static_cast<std::int64_t>(i), +1);
  }
  return c;
}

SpinConfig SpinConfig::from_bits(std::int64_t n, std::uint64_t bits) {
  if (n > 64) throw std::invalid_argument("SpinConfig::from_bits: n > 64");
  SpinConfig c(n, -1);
  if (n > 0) c.words_[0] = n == 64 ? bits : (bits & ((1ULL << n) - 1));
  return c;
}

void SpinConfig::set(std::int64_t i, int spin) {
  // Branchless: callers set spins whose new sign is data-dependent noise.
  std::uint64_t mask = 1ULL << (i & 63);
  std::uint64_t bit = spin == +1 ? mask : 0;
  words_[i >> 6] = (words_[i >> 6] & ~mask) | bit;
}

std::vector<int> SpinConfig::to_vector() const {
  std::vector<int> v(n_);
  for (std::int64_t i = 0; i < n_; ++i) v[i] = get(i);
  return v;
}

std::int64_t SpinConfig::sum() const {
  std::int64_t plus = 0;
  for (auto w : words_) plus += std::popcount(w);
  return 2 * plus - n_;
}

double SpinConfig::mean() const {
  return n_ == 0 ? 0.0 : static_cast<double>(sum()) / static_cast<double>(n_);
}

std::uint64_t SpinConfig::bits() const {
  if (n_ > 64) throw std::logic_error("SpinConfig::bits: n > 64");
  return words_.empty() ? 0 : words_[0];
}

std::string SpinConfig::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::int64_t bytes = (n_ + 7) / 8;
  std::string out;
  out.reserve(2 * bytes);
  for (std::int64_t b = 0; b < bytes; ++b) {
    unsigned byte = static_cast<unsigned>((words_[b / 8] >> (8 * (b % 8))) & 0xFF);
    out.push_back(digits[byte >> 4]);
    out.push_back(digits[byte & 0xF]);
  }
  return out;
}

SpinConfig SpinConfig::from_hex(std::int64_t n, const std::string& hex) {
  std::int64_t bytes = (n + 7) / 8;
  if (static_cast<std::int64_t>(hex.size()) != 2 * bytes)
    throw std::invalid_argument("SpinConfig::from_hex: length mismatch");
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    throw std::invalid_argument("SpinConfig::from_hex: bad hex digit");
  };
  SpinConfig c(n, -1);
  for (std::int64_t b = 0; b < bytes; ++b) {
    unsigned byte = (nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]);
    c.words_[b / 8] |= static_cast<std::uint64_t>(byte) << (8 * (b % 8));
  }
  if (n % 64 != 0 && !c.words_.empty()) {
    // bits beyond n must be zero
    std::uint64_t mask = (1ULL << (n % 64)) - 1;
    if ((c.words_.back() & ~mask) != 0)
      throw std::invalid_argument("SpinConfig::from_hex: nonzero padding bits");
  }
  return c;
}

// ---------------------------------------------------------------- ModelParams

bool ModelParams::ferromagnetic() const { return beta >= 0.0; }

void ModelParams::validate() const {
  if (!field.empty() && static_cast<std::int64_t>(field.size()) != coupling.n)
    throw std::invalid_argument("ModelParams: field length != coupling dimension");
  if (!std::isfinite(beta)) throw std::invalid_argument("ModelParams: beta not finite");
}

// ---------------------------------------------------------------- local fields

double LocalFields::mean() const {
  if (m.empty()) return 0.0;
  KahanSum s;
  for (double v : m) s.add(v);
  return s.value() / static_cast<double>(m.size());
}

LocalFields local_fields(const CouplingMatrix& q, const SpinConfig& x) {
  LocalFields f;
  f.m.assign(q.n, 0.0);
  for (std::int64_t i = 0; i < q.n; ++i) {
    double s = 0.0;
    for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k)
      s += q.val[k] * x.get(q.col[k]);
    f.m[i] = s;
  }
  return f;
}

std::vector<double> local_fields_for_sites(const CouplingMatrix& q, const SpinConfig& x,
                                           const std::vector<std::int32_t>& sites) {
  std::vector<double> out(sites.size());
  if (q.is_complete_uniform) {
    const double c = q.uniform_value;
    const std::int64_t M = x.sum();
    for (std::size_t k = 0; k < sites.size(); ++k)
      out[k] = c * static_cast<double>(M - x.get(sites[k]));
    return out;
  }
  for (std::size_t k = 0; k < sites.size(); ++k) {
    std::int64_t i = sites[k];
    double s = 0.0;
    for (std::int64_t e = q.row_start[i]; e < q.row_start[i + 1]; ++e)
      s += q.val[e] * x.get(q.col[e]);
    out[k] = s;
  }
  return out;
}

// --------------------------------------------------------------- conditionals

double conditional_prob_plus(double beta, double m_i, double mu_i) {
  double p = 0.5 * (1.0 + std::tanh(beta * m_i + mu_i));
  // Mathematically p ∈ (0,1); keep it there when tanh saturates in double.
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;  // nextafter(1,0)
  return std::clamp(p, lo, hi);
}

double log_weight(const ModelParams& params, const SpinConfig& x) {
  const CouplingMatrix& q = params.coupling;
  KahanSum s;
  // β Σ_{i<j} Q_ij x_i x_j  (each CSR entry appears twice; visit i<j only)
  for (std::int64_t i = 0; i < q.n; ++i) {
    int xi = x.get(i);
    for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k) {
      std::int32_t j = q.col[k];
      if (j > i) s.add(params.beta * q.val[k] * xi * x.get(j));
    }
  }
  if (!params.field.empty()) {
    for (std::int64_t i = 0; i < q.n; ++i) s.add(params.field[i] * x.get(i));
  }
  return s.value();
}

void glauber_step(const ModelParams& params, SpinConfig& x, LocalFields& f,
                  std::int64_t i, double u) {
  const CouplingMatrix& q = params.coupling;
  double p = conditional_prob_plus(params.beta, f.m[i], params.mu(i));
  int newspin = (u < p) ? +1 : -1;
  int old = x.get(i);
  if (newspin != old) {
    x.set(i, newspin);
    const double delta = 2.0 * newspin;  // newspin − old = ±2
    for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k)
      f.m[q.col[k]] += delta * q.val[k];
  }
}

// -------------------------------------------------------------------- sampler

std::int64_t SamplerConfig::resolved_burn_in(double beta, std::int64_t n) const {
  if (burn_in >= 0) return burn_in;
  double logn = n > 1 ? std::ceil(std::log(static_cast<double>(n))) : 1.0;
  return static_cast<std::int64_t>((beta < 1.0 ? 200.0 : 2000.0) * logn);
}

void SamplerConfig::validate() const {
  if (thinning < 0) throw std::invalid_argument("SamplerConfig: thinning must be >= 0");
  if (num_samples < 1) throw std::invalid_argument("SamplerConfig: num_samples must be >= 1");
}

namespace {

SpinConfig initial_state(const SamplerConfig& cfg, std::int64_t n, Rng& rng) {
  switch (cfg.init) {
    case InitState::AllPlus: return SpinConfig(n, +1);
    case InitState::AllMinus: return SpinConfig(n, -1);
    case InitState::UniformRandom: {
      SpinConfig x(n, -1);
      for (std::int64_t i = 0; i < n; ++i)
        if (uniform01(rng) < 0.5) x.set(i, +1);
      return x;
    }
  }
  throw std::logic_error("initial_state: bad init rule");
}

// General sparse sweep: one heat-bath update per site in index order.
void sweep_general(const ModelParams& params, SpinConfig& x, LocalFields& f, Rng& rng) {
  const std::int64_t n = params.n();
  for (std::int64_t i = 0; i < n; ++i) glauber_step(params, x, f, i, uniform01(rng));
}

// Complete-uniform fast path: Q = c·(J − I) makes m_i = c·(M − x_i) a function
// of the total magnetization M alone, so the conditional probabilities can be
// tabulated per distinct field value and each update is O(1).
struct CompleteUniformTables {
  std::vector<std::vector<double>> table;  // [field value index][(M − x_i) + (n−1)]
  std::vector<std::uint8_t> site_value;    // field value index per site
  bool usable = false;
};

CompleteUniformTables build_tables(const ModelParams& params) {
  CompleteUniformTables t;
  const std::int64_t n = params.n();
  if (!params.coupling.is_complete_uniform || n < 2) return t;
  std::map<double, std::uint8_t> values;
  std::vector<double> distinct;
  t.site_value.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    double v = params.mu(i);
    auto it = values.find(v);
    if (it == values.end()) {
      if (distinct.size() >= 255) return t;  // too many field levels; general path
      values.emplace(v, static_cast<std::uint8_t>(distinct.size()));
      distinct.push_back(v);
      it = values.find(v);
    }
    t.site_value[i] = it->second;
  }
  const double c = params.coupling.uniform_value;
  t.table.resize(distinct.size());
  for (std::size_t vi = 0; vi < distinct.size(); ++vi) {
    t.table[vi].resize(2 * n - 1);
    for (std::int64_t m = -(n - 1); m <= n - 1; ++m)
      t.table[vi][m + (n - 1)] =
          conditional_prob_plus(params.beta, c * static_cast<double>(m), distinct[vi]);
  }
  t.usable = true;
  return t;
}

void sweep_complete(const CompleteUniformTables& t, std::int64_t n, SpinConfig& x,
                    std::int64_t& M, Rng& rng) {
  // Branchless update bodies: at p ≈ 1/2 the accept comparison is a coin flip,
  // so a conditional store would mispredict half the time. Zero-field models
  // (the dominant case in risk sweeps) also skip the per-site level lookup.
  if (t.table.size() == 1) {
    const double* tbl = t.table[0].data();
    for (std::int64_t i = 0; i < n; ++i) {
      int xi = x.get(i);
      int newspin = (uniform01(rng) < tbl[(M - xi) + (n - 1)]) ? +1 : -1;
      M += newspin - xi;
      x.set(i, newspin);
    }
    return;
  }
  for (std::int64_t i = 0; i < n; ++i) {
    int xi = x.get(i);
    double p = t.table[t.site_value[i]][(M - xi) + (n - 1)];
    int newspin = (uniform01(rng) < p) ? +1 : -1;
    M += newspin - xi;
    x.set(i, newspin);
  }
}

}  // namespace

std::vector<SpinConfig> glauber_sample(const ModelParams& params, const SamplerConfig& cfg) {
  params.validate();
  cfg.validate();
  const std::int64_t n = params.n();
  Rng rng = make_rng(cfg.seed);
  SpinConfig x = initial_state(cfg, n, rng);

  CompleteUniformTables tables = build_tables(params);
  LocalFields f;
  std::int64_t M = 0;
  if (tables.usable) M = x.sum();
  else f = local_fields(params.coupling, x);

  auto run_sweeps = [&](std::int64_t count) {
    for (std::int64_t s = 0; s < count; ++s) {
      if (tables.usable) sweep_complete(tables, n, x, M, rng);
      else sweep_general(params, x, f, rng);
    }
  };

  run_sweeps(cfg.resolved_burn_in(params.beta, n));

  std::vector<SpinConfig> out;
  out.reserve(cfg.num_samples);
  // First sample right after burn-in, then `thinning` sweeps between samples.
  // Under {X̄ ≥ 0} conditioning a candidate with X̄ < 0 triggers one more sweep.
  const std::int64_t max_rejections = 1000000;
  std::int64_t rejections = 0;
  bool first = true;
  while (static_cast<std::int64_t>(out.size()) < cfg.num_samples) {
    if (!first) run_sweeps(cfg.thinning);
    first = false;
    if (cfg.condition_nonneg_mag) {
      std::int64_t total = tables.usable ? M : x.sum();
      if (total < 0) {
        if (++rejections > max_rejections)
          throw std::runtime_error("glauber_sample: conditioning {X. >= 0} rejected 1e6 sweeps");
        run_sweeps(1);
        first = true;  // re-inspect without extra thinning
        continue;
      }
    }
    out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------- enumeration

ExactDistribution exact_distribution(const ModelParams& params) {
  params.validate();
  const std::int64_t n = params.n();
  if (n > kExactEnumerationCap)
    throw std::invalid_argument("exact_distribution: n exceeds the exact-enumeration cap 20");
  const std::int64_t states = std::int64_t(1) << n;

  // Per-state direct evaluation (O(|E|) each, no incremental drift): exactness
  // here backs 1e-12 assertions downstream.
  ExactDistribution dist;
  dist.n = n;
  dist.prob.resize(states);
  const CouplingMatrix& q = params.coupling;
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  std::vector<double> pair_q;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k)
      if (q.col[k] > i) {
        pairs.emplace_back(static_cast<std::int32_t>(i), q.col[k]);
        pair_q.push_back(q.val[k]);
      }

  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::int64_t s = 0; s < states; ++s) {
    const std::uint64_t bits = static_cast<std::uint64_t>(s);
    KahanSum lw;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      int xi = (bits >> pairs[e].first) & 1 ? 1 : -1;
      int xj = (bits >> pairs[e].second) & 1 ? 1 : -1;
      lw.add(params.beta * pair_q[e] * xi * xj);
    }
    if (!params.field.empty()) {
      for (std::int64_t i = 0; i < n; ++i)
        lw.add(params.field[i] * ((bits >> i) & 1 ? 1.0 : -1.0));
    }
    dist.prob[s] = lw.value();  // holds log-weights for now
    max_logw = std::max(max_logw, dist.prob[s]);
  }
  KahanSum z;
  for (std::int64_t s = 0; s < states; ++s) z.add(std::exp(dist.prob[s] - max_logw));
  dist.log_Z = max_logw + std::log(z.value());
  for (std::int64_t s = 0; s < states; ++s)
    dist.prob[s] = std::exp(dist.prob[s] - dist.log_Z);
  return dist;
}

std::vector<SpinConfig> exact_sample(const ExactDistribution& dist, std::int64_t count,
                                     std::uint64_t seed) {
  const std::int64_t states = static_cast<std::int64_t>(dist.prob.size());
  std::vector<double> cdf(dist.prob.size());
  KahanSum acc;
  for (std::int64_t s = 0; s < states; ++s) {
    acc.add(dist.prob[s]);
    cdf[s] = acc.value();
  }
  cdf.back() = 1.0;
  Rng rng = make_rng(seed);
  std::vector<SpinConfig> out;
  out.reserve(count);
  for (std::int64_t k = 0; k < count; ++k) {
    double u = uniform01(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::int64_t s = std::distance(cdf.begin(), it);
    if (s >= states) s = states - 1;
    out.push_back(SpinConfig::from_bits(dist.n, static_cast<std::uint64_t>(s)));
  }
  return out;
}

std::vector<SpinConfig> exact_sample(const ModelParams& params, std::int64_t count,
                                     std::uint64_t seed) {
  return exact_sample(exact_distribution(params), count, seed);
}

std::vector<double> field_vector(std::int64_t n, const std::vector<std::int32_t>& S,
                                 double eta) {
  if (eta < 0.0) throw std::invalid_argument("field_vector: eta must be >= 0");
  std::vector<double> mu(n, 0.0);
  for (auto i : S) {
    if (i < 0 || i >= n) throw std::invalid_argument("field_vector: index out of range");
    mu[i] = eta;
  }
  return mu;
}

// ------------------------------------------------------------------- file I/O

void save_samples(const std::vector<SpinConfig>& samples, std::int64_t n,
                  std::uint64_t seed, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_samples: cannot open " + path);
  out << n << ' ' << samples.size() << ' ' << seed << '\n';
  for (const auto& s : samples) out << s.to_hex() << '\n';
  if (!out) throw std::runtime_error("save_samples: write failed on " + path);
}

std::vector<SpinConfig> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_samples: cannot open " + path);
  std::int64_t n = 0, count = 0;
  std::uint64_t seed = 0;
  if (!(in >> n >> count >> seed))
    throw std::runtime_error("load_samples: bad header (want `n num_samples seed`)");
  std::vector<SpinConfig> out;
  out.reserve(count);
  std::string line;
  std::getline(in, line);
  for (std::int64_t k = 0; k < count; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error("load_samples: truncated dump");
    out.push_back(SpinConfig::from_hex(n, line));
  }
  return out;
}

}  // namespace ising
