#include "ising/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ising/graphs.hpp"
#include "ising/rng.hpp"
#include "ising/util.hpp"

namespace ising {

namespace {

struct EdgeTerms {
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  std::vector<double> q;
};

EdgeTerms edge_terms(const CouplingMatrix& q) {
  EdgeTerms e;
  for (std::int64_t i = 0; i < q.n; ++i)
    for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k)
      if (q.col[k] > i) {
        e.pairs.emplace_back(static_cast<std::int32_t>(i), q.col[k]);
        e.q.push_back(q.val[k]);
      }
  return e;
}

double state_log_weight(const ModelParams& params, const EdgeTerms& e, std::uint64_t bits) {
  KahanSum lw;
  for (std::size_t k = 0; k < e.pairs.size(); ++k) {
    int xi = (bits >> e.pairs[k].first) & 1 ? 1 : -1;
    int xj = (bits >> e.pairs[k].second) & 1 ? 1 : -1;
    lw.add(params.beta * e.q[k] * xi * xj);
  }
  if (!params.field.empty())
    for (std::int64_t i = 0; i < params.n(); ++i)
      lw.add(params.field[i] * ((bits >> i) & 1 ? 1.0 : -1.0));
  return lw.value();
}

bool in_condition(std::uint64_t bits, std::int64_t n, Conditioning c) {
  if (c == Conditioning::None) return true;
  return 2 * std::popcount(bits) >= n;  // mean spin >= 0, ties included
}

void check_cap(std::int64_t n, const char* who) {
  if (n > kExactEnumerationCap) {
    std::ostringstream msg;
    msg << who << ": n = " << n << " exceeds the exact-enumeration cap "
        << kExactEnumerationCap;
    throw std::invalid_argument(msg.str());
  }
}

// Probability of {X_i = +1 for all i in mask} under a normalized state table.
double event_all_plus(const ExactDistribution& dist, std::uint64_t mask) {
  KahanSum p;
  const std::int64_t states = static_cast<std::int64_t>(dist.prob.size());
  for (std::int64_t s = 0; s < states; ++s)
    if ((static_cast<std::uint64_t>(s) & mask) == mask) p.add(dist.prob[s]);
  return p.value();
}

std::uint64_t set_mask(const std::vector<std::int32_t>& S, std::int64_t n, const char* who) {
  std::uint64_t mask = 0;
  for (auto i : S) {
    if (i < 0 || i >= n) throw std::invalid_argument(std::string(who) + ": index out of range");
    std::uint64_t bit = 1ULL << i;
    if (mask & bit) throw std::invalid_argument(std::string(who) + ": repeated index in set");
    mask |= bit;
  }
  return mask;
}

}  // namespace

PartitionValue partition_function(const ModelParams& params, Conditioning conditioning) {
  params.validate();
  check_cap(params.n(), "partition_function");
  const std::int64_t n = params.n();
  const std::int64_t states = std::int64_t(1) << n;
  EdgeTerms e = edge_terms(params.coupling);
  OnlineLogSumExp lse;
  for (std::int64_t s = 0; s < states; ++s) {
    std::uint64_t bits = static_cast<std::uint64_t>(s);
    if (!in_condition(bits, n, conditioning)) continue;
    lse.add(state_log_weight(params, e, bits));
  }
  return PartitionValue{lse.value()};
}

MomentTable moments(const ModelParams& params, Conditioning conditioning) {
  check_cap(params.n(), "moments");
  const std::int64_t n = params.n();
  const std::int64_t states = std::int64_t(1) << n;
  ExactDistribution dist = exact_distribution(params);

  double norm = 1.0;
  if (conditioning != Conditioning::None) {
    KahanSum p;
    for (std::int64_t s = 0; s < states; ++s)
      if (in_condition(static_cast<std::uint64_t>(s), n, conditioning)) p.add(dist.prob[s]);
    norm = p.value();
  }

  MomentTable table;
  table.n = n;
  table.conditioning = conditioning;
  table.means.assign(n, 0.0);
  table.cov.assign(n * n, 0.0);

  std::vector<KahanSum> mean_acc(n);
  for (std::int64_t s = 0; s < states; ++s) {
    std::uint64_t bits = static_cast<std::uint64_t>(s);
    if (!in_condition(bits, n, conditioning)) continue;
    double w = dist.prob[s];
    for (std::int64_t i = 0; i < n; ++i)
      mean_acc[i].add((bits >> i) & 1 ? w : -w);
  }
  for (std::int64_t i = 0; i < n; ++i) table.means[i] = mean_acc[i].value() / norm;

  // Second pass: centered products (upper triangle, mirrored afterwards).
  std::vector<KahanSum> cov_acc(n * (n + 1) / 2);
  std::vector<double> centered(n);
  for (std::int64_t s = 0; s < states; ++s) {
    std::uint64_t bits = static_cast<std::uint64_t>(s);
    if (!in_condition(bits, n, conditioning)) continue;
    double w = dist.prob[s] / norm;
    for (std::int64_t i = 0; i < n; ++i)
      centered[i] = ((bits >> i) & 1 ? 1.0 : -1.0) - table.means[i];
    std::int64_t idx = 0;
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = i; j < n; ++j)
        cov_acc[idx++].add(w * centered[i] * centered[j]);
  }
  std::int64_t idx = 0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i; j < n; ++j) {
      double c = cov_acc[idx++].value();
      table.cov[i * n + j] = c;
      table.cov[j * n + i] = c;
    }
  return table;
}

FixedPoint fixed_point(double beta, double B) {
  if (B < 0.0) throw std::invalid_argument("fixed_point: B must be >= 0");
  if (!std::isfinite(beta) || !std::isfinite(B))
    throw std::invalid_argument("fixed_point: arguments must be finite");

  auto phi = [&](double x) { return x - std::tanh(beta * x + B); };
  auto regime_of = [&]() {
    if (beta < 1.0) return FixedPointRegime::High;
    if (beta == 1.0) return FixedPointRegime::Critical;
    return FixedPointRegime::Low;
  };

  FixedPoint fp;
  fp.regime = regime_of();
  if (B == 0.0 && beta <= 1.0) {
    fp.t = 0.0;  // unique nonnegative root
    fp.phi_prime = 1.0 - beta;
    return fp;
  }
  // For beta > 1, B = 0 the root t = 0 is excluded; start the bracket just
  // above it (phi(1e-8) < 0 there since tanh(beta*x) > x near 0 for beta > 1).
  double lo = (B == 0.0) ? 1e-8 : 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    double mid = 0.5 * (lo + hi);
    if (phi(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  fp.t = 0.5 * (lo + hi);
  double th = std::tanh(beta * fp.t + B);
  fp.phi_prime = 1.0 - beta * (1.0 - th * th);
  if (std::abs(phi(fp.t)) > 1e-12)
    throw std::logic_error("fixed_point: bisection failed to reach 1e-12 residual");
  return fp;
}

SecondMomentReport second_moment_mixture(const ModelParams& params_null,
                                         const std::vector<std::vector<std::int32_t>>& sets,
                                         std::int64_t s, double A, SecondMomentMode mode) {
  params_null.validate();
  const std::int64_t n = params_null.n();
  check_cap(n, "second_moment_mixture");
  for (double mu : params_null.field)
    if (mu != 0.0)
      throw std::invalid_argument("second_moment_mixture: null model must have zero field");
  if (sets.empty()) throw std::invalid_argument("second_moment_mixture: empty class");
  if (mode == SecondMomentMode::FiniteA && !(A >= 0.0))
    throw std::invalid_argument("second_moment_mixture: A must be >= 0");

  const std::int64_t k = static_cast<std::int64_t>(sets.size());
  std::vector<std::uint64_t> masks(k);
  for (std::int64_t a = 0; a < k; ++a) {
    if (static_cast<std::int64_t>(sets[a].size()) != s)
      throw std::invalid_argument("second_moment_mixture: set size != s");
    masks[a] = set_mask(sets[a], n, "second_moment_mixture");
  }
  for (std::int64_t a = 0; a < k; ++a)
    for (std::int64_t b = a + 1; b < k; ++b)
      if (masks[a] & masks[b])
        throw std::invalid_argument("second_moment_mixture: sets must be pairwise disjoint");

  SecondMomentReport rep;
  rep.k = k;
  rep.mode = mode;
  rep.terms.assign(k * k, 0.0);
  rep.notes =
      "Exact finite-n decomposition; asymptotic proof-rate constants are not "
      "computed here.";

  auto with_field = [&](const std::vector<std::int32_t>& S, double eta) {
    ModelParams p = params_null;
    p.field = field_vector(n, S, eta);
    return p;
  };

  if (mode == SecondMomentMode::FiniteA) {
    rep.A = A;
    const double logZ0 = partition_function(params_null).log_Z;
    std::vector<double> logZ_A(k), logZ_2A(k);
    for (std::int64_t a = 0; a < k; ++a) {
      logZ_A[a] = partition_function(with_field(sets[a], A)).log_Z;
      logZ_2A[a] = partition_function(with_field(sets[a], 2.0 * A)).log_Z;
      rep.terms[a * k + a] = std::exp(logZ0 + logZ_2A[a] - 2.0 * logZ_A[a]);
    }
    for (std::int64_t a = 0; a < k; ++a)
      for (std::int64_t b = a + 1; b < k; ++b) {
        std::vector<std::int32_t> uni = sets[a];
        uni.insert(uni.end(), sets[b].begin(), sets[b].end());
        double logZU = partition_function(with_field(uni, A)).log_Z;
        double cross = std::exp(logZ0 + logZU - logZ_A[a] - logZ_A[b]);
        rep.terms[a * k + b] = cross;
        rep.terms[b * k + a] = cross;
      }
  } else {
    rep.A = std::numeric_limits<double>::infinity();
    ExactDistribution dist = exact_distribution(params_null);
    std::vector<double> p_set(k);
    for (std::int64_t a = 0; a < k; ++a) {
      p_set[a] = event_all_plus(dist, masks[a]);
      rep.terms[a * k + a] = 1.0 / p_set[a];
    }
    for (std::int64_t a = 0; a < k; ++a)
      for (std::int64_t b = a + 1; b < k; ++b) {
        double p_union = event_all_plus(dist, masks[a] | masks[b]);
        double cross = p_union / (p_set[a] * p_set[b]);
        rep.terms[a * k + b] = cross;
        rep.terms[b * k + a] = cross;
      }
  }

  KahanSum total;
  for (double t : rep.terms) total.add(t);
  rep.value = total.value() / (static_cast<double>(k) * static_cast<double>(k));
  return rep;
}

std::vector<double> chain_correlation(std::int64_t n, double beta) {
  if (n < 1 || n > 16)
    throw std::invalid_argument("chain_correlation: need 1 <= n <= 16");
  AdjacencyMatrix adj = build_lattice(1, n, 1);
  ModelParams params{beta, coupling_from_graph(adj, Scaling::Raw), {}};
  MomentTable table = moments(params);

  std::vector<double> corr(n * n);
  const double th = std::tanh(beta);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      double value = table.pair_moment(i, j);
      double target = std::pow(th, std::abs(i - j));
      if (std::abs(value - target) > 1e-12) {
        std::ostringstream msg;
        msg << "chain_correlation: enumeration " << value << " vs product form "
            << target << " at (" << i << "," << j << "), beta = " << beta;
        throw std::logic_error(msg.str());
      }
      corr[i * n + j] = value;
    }
  return corr;
}

namespace {

struct RandomInstance {
  std::int64_t n;
  double beta;
  std::vector<double> q1, q2;    // dense symmetric couplings, q2 <= q1 entrywise
  std::vector<double> mu1, mu2;  // mu1 >= mu2 >= 0 coordinatewise
};

RandomInstance draw_instance(Rng& rng) {
  RandomInstance inst;
  inst.n = 3 + static_cast<std::int64_t>(uniform_below(rng, 6));
  const std::int64_t n = inst.n;
  inst.q1.assign(n * n, 0.0);
  inst.q2.assign(n * n, 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j) {
      if (uniform01(rng) < 0.5) {
        double w = uniform01(rng);
        double shrink = uniform01(rng);
        inst.q1[i * n + j] = inst.q1[j * n + i] = w;
        inst.q2[i * n + j] = inst.q2[j * n + i] = w * shrink;
      }
    }
  inst.beta = 2.0 * uniform01(rng);
  inst.mu2.resize(n);
  inst.mu1.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    inst.mu2[i] = uniform01(rng);
    inst.mu1[i] = inst.mu2[i] + uniform01(rng);
  }
  return inst;
}

// magnitude = amount by which `actual >= required` fails; negative means slack.
void record(InequalityCheckStats& stats, double required, double actual, double tol,
            bool& violated) {
  stats.checked += 1;
  double magnitude = required - actual;
  stats.max_violation = std::max(stats.max_violation, magnitude);
  if (magnitude > tol) {
    stats.violations += 1;
    violated = true;
  }
}

}  // namespace

std::int64_t InequalityReport::total_violations() const {
  return nonneg_cov.violations + nonneg_mean.violations + field_ordering.violations +
         coupling_growth.violations + mean_vs_field.violations;
}

std::string InequalityReport::to_json() const {
  nlohmann::ordered_json j;
  j["instances"] = instances;
  j["base_seed"] = base_seed;
  j["tolerance"] = tol;
  auto dump = [](const InequalityCheckStats& s) {
    nlohmann::ordered_json c;
    c["checked"] = s.checked;
    c["violations"] = s.violations;
    c["max_violation"] = s.max_violation;
    return c;
  };
  j["checks"]["nonnegative_covariance"] = dump(nonneg_cov);
  j["checks"]["nonnegative_mean"] = dump(nonneg_mean);
  j["checks"]["field_ordering"] = dump(field_ordering);
  j["checks"]["coupling_growth"] = dump(coupling_growth);
  j["checks"]["mean_vs_field"] = dump(mean_vs_field);
  j["total_violations"] = total_violations();
  j["any_violation"] = any_violation;
  if (any_violation) j["first_violating_seed"] = first_violating_seed;
  return j.dump(2);
}

InequalityReport verify_inequalities(std::int64_t instances, std::uint64_t base_seed,
                                     double tol) {
  InequalityReport rep;
  rep.instances = instances;
  rep.base_seed = base_seed;
  rep.tol = tol;

  for (std::int64_t idx = 0; idx < instances; ++idx) {
    const std::uint64_t inst_seed = derive_seed(base_seed, idx, 0);
    Rng rng = make_rng(base_seed, idx);
    RandomInstance inst = draw_instance(rng);
    const std::int64_t n = inst.n;

    CouplingMatrix q1 = coupling_from_dense(n, inst.q1, Scaling::Raw);
    CouplingMatrix q2 = coupling_from_dense(n, inst.q2, Scaling::Raw);
    MomentTable t_mu1 = moments({inst.beta, q1, inst.mu1});
    MomentTable t_mu2 = moments({inst.beta, q1, inst.mu2});
    MomentTable t_q1 = moments({inst.beta, q1, {}});
    MomentTable t_q2 = moments({inst.beta, q2, {}});

    bool violated = false;
    for (const MomentTable* t : {&t_mu1, &t_mu2}) {
      for (std::int64_t i = 0; i < n; ++i) {
        record(rep.nonneg_mean, 0.0, t->means[i], tol, violated);
        for (std::int64_t j = 0; j < n; ++j)
          record(rep.nonneg_cov, 0.0, t->cov_at(i, j), tol, violated);
      }
    }
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        // larger field shrinks covariances; larger couplings grow them
        record(rep.field_ordering, t_mu1.cov_at(i, j), t_mu2.cov_at(i, j), tol, violated);
        record(rep.coupling_growth, t_q2.cov_at(i, j), t_q1.cov_at(i, j), tol, violated);
      }
    const double rho = 1.0 - std::tanh(inst.beta * q1.inf_norm);
    for (std::int64_t i = 0; i < n; ++i) {
      record(rep.mean_vs_field, rho * std::tanh(inst.mu1[i]), t_mu1.means[i], tol, violated);
      record(rep.mean_vs_field, rho * std::tanh(inst.mu2[i]), t_mu2.means[i], tol, violated);
    }
    if (violated && !rep.any_violation) {
      rep.any_violation = true;
      rep.first_violating_seed = inst_seed;
    }
  }
  return rep;
}

namespace {

double tilted_g(std::int64_t plus_count, std::int64_t s, double beta, double t) {
  // product tilt exp(beta*t*sum a_i) / (2 cosh(beta*t))^s, sum a_i = 2p - s
  double log_g = beta * t * static_cast<double>(2 * plus_count - s) -
                 static_cast<double>(s) * std::log(2.0 * std::cosh(beta * t));
  return std::exp(log_g);
}

}  // namespace

MarginalDeviation small_marginal_deviation(const ModelParams& params, std::int64_t s) {
  params.validate();
  const std::int64_t n = params.n();
  check_cap(n, "small_marginal_deviation");
  if (s < 1 || s > n) throw std::invalid_argument("small_marginal_deviation: need 1 <= s <= n");
  for (double mu : params.field)
    if (mu != 0.0)
      throw std::invalid_argument("small_marginal_deviation: zero field required");

  MarginalDeviation out;
  out.conditioned = params.beta > 1.0;
  out.tilt_t = out.conditioned ? fixed_point(params.beta, 0.0).t : 0.0;

  ExactDistribution dist = exact_distribution(params);
  const std::int64_t states = std::int64_t(1) << n;
  double norm = 1.0;
  if (out.conditioned) {
    KahanSum p;
    for (std::int64_t st = 0; st < states; ++st)
      if (in_condition(static_cast<std::uint64_t>(st), n, Conditioning::NonnegativeMagnetization))
        p.add(dist.prob[st]);
    norm = p.value();
  }

  // Precompute g per pattern plus-count.
  std::vector<double> g(s + 1);
  for (std::int64_t p = 0; p <= s; ++p)
    g[p] = out.conditioned ? tilted_g(p, s, params.beta, out.tilt_t)
                           : std::pow(2.0, -static_cast<double>(s));

  auto scan_set = [&](const std::vector<std::int32_t>& S) {
    std::vector<double> pattern_mass(std::size_t(1) << s, 0.0);
    for (std::int64_t st = 0; st < states; ++st) {
      std::uint64_t bits = static_cast<std::uint64_t>(st);
      if (out.conditioned &&
          !in_condition(bits, n, Conditioning::NonnegativeMagnetization))
        continue;
      std::uint64_t pat = 0;
      for (std::int64_t b = 0; b < s; ++b)
        if ((bits >> S[b]) & 1) pat |= 1ULL << b;
      pattern_mass[pat] += dist.prob[st];
    }
    for (std::uint64_t pat = 0; pat < pattern_mass.size(); ++pat) {
      double prob = pattern_mass[pat] / norm;
      double dev = std::abs(prob / g[std::popcount(pat)] - 1.0);
      out.deviation = std::max(out.deviation, dev);
    }
    out.sets_checked += 1;
  };

  const bool exchangeable = params.coupling.is_complete_uniform;
  if (exchangeable) {
    std::vector<std::int32_t> S(s);
    for (std::int64_t i = 0; i < s; ++i) S[i] = static_cast<std::int32_t>(i);
    scan_set(S);
    return out;
  }
  // All size-s subsets in lexicographic order.
  double log_count = 0.0;
  for (std::int64_t i = 0; i < s; ++i)
    log_count += std::log(double(n - i)) - std::log(double(i + 1));
  if (log_count > std::log(1e5))
    throw std::invalid_argument(
        "small_marginal_deviation: too many subsets; use the sampled mode");
  std::vector<std::int32_t> S(s);
  for (std::int64_t i = 0; i < s; ++i) S[i] = static_cast<std::int32_t>(i);
  while (true) {
    scan_set(S);
    std::int64_t pos = s - 1;
    while (pos >= 0 && S[pos] == n - s + pos) --pos;
    if (pos < 0) break;
    ++S[pos];
    for (std::int64_t j = pos + 1; j < s; ++j) S[j] = S[j - 1] + 1;
  }
  return out;
}

MarginalDeviation small_marginal_deviation_sampled(
    const ModelParams& params, std::int64_t s,
    const std::vector<std::vector<std::int32_t>>& sets, const SamplerConfig& sampler) {
  params.validate();
  if (s < 1 || s > params.n())
    throw std::invalid_argument("small_marginal_deviation_sampled: need 1 <= s <= n");
  if (sets.empty())
    throw std::invalid_argument("small_marginal_deviation_sampled: no sets given");
  for (const auto& S : sets) {
    if (static_cast<std::int64_t>(S.size()) != s)
      throw std::invalid_argument("small_marginal_deviation_sampled: set size != s");
    set_mask(S, params.n(), "small_marginal_deviation_sampled");
  }

  MarginalDeviation out;
  out.conditioned = params.beta > 1.0;
  out.tilt_t = out.conditioned ? fixed_point(params.beta, 0.0).t : 0.0;

  SamplerConfig cfg = sampler;
  cfg.condition_nonneg_mag = out.conditioned;
  std::vector<SpinConfig> samples = glauber_sample(params, cfg);
  const double N = static_cast<double>(samples.size());

  std::vector<double> g(s + 1);
  for (std::int64_t p = 0; p <= s; ++p)
    g[p] = out.conditioned ? tilted_g(p, s, params.beta, out.tilt_t)
                           : std::pow(2.0, -static_cast<double>(s));

  for (const auto& S : sets) {
    std::vector<std::int64_t> counts(std::size_t(1) << s, 0);
    for (const auto& x : samples) {
      std::uint64_t pat = 0;
      for (std::int64_t b = 0; b < s; ++b)
        if (x.get(S[b]) == 1) pat |= 1ULL << b;
      counts[pat] += 1;
    }
    for (std::uint64_t pat = 0; pat < counts.size(); ++pat) {
      double phat = static_cast<double>(counts[pat]) / N;
      double gval = g[std::popcount(pat)];
      double dev = std::abs(phat / gval - 1.0);
      double se = std::sqrt(std::max(phat * (1.0 - phat), 0.0) / N) / gval;
      if (dev > out.deviation) out.deviation = dev;
      out.mc_error = std::max(out.mc_error, se);
    }
    out.sets_checked += 1;
  }
  return out;
}

}  // namespace ising
