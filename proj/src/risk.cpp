#include "ising/risk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "ising/rng.hpp"
#include "ising/util.hpp"

namespace ising {

namespace {

// Draws one configuration per derived replicate seed, either by inverse CDF
// over a (possibly conditioned) exact table or by an independent Glauber run.
class ReplicateSampler {
 public:
  ReplicateSampler(const ModelParams& params, const SamplerConfig& sampler)
      : params_(params), cfg_(sampler) {
    exact_ = params.n() <= kExactEnumerationCap;
    if (!exact_) return;
    ExactDistribution dist = exact_distribution(params);
    n_ = dist.n;
    cdf_.resize(dist.prob.size());
    const bool conditioned = cfg_.condition_nonneg_mag;
    KahanSum acc;
    for (std::size_t s = 0; s < dist.prob.size(); ++s) {
      bool keep = !conditioned ||
                  2 * std::popcount(static_cast<std::uint64_t>(s)) >= n_;
      if (keep) acc.add(dist.prob[s]);
      cdf_[s] = acc.value();
    }
    const double total = cdf_.back();
    if (total <= 0.0) throw std::logic_error("ReplicateSampler: empty conditioned support");
    for (auto& c : cdf_) c /= total;
    cdf_.back() = 1.0;
  }

  SpinConfig draw(std::uint64_t seed) const {
    if (exact_) {
      Rng rng = make_rng(seed);
      double u = uniform01(rng);
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      std::int64_t s = std::distance(cdf_.begin(), it);
      if (s >= static_cast<std::int64_t>(cdf_.size()))
        s = static_cast<std::int64_t>(cdf_.size()) - 1;
      return SpinConfig::from_bits(n_, static_cast<std::uint64_t>(s));
    }
    SamplerConfig cfg = cfg_;
    cfg.seed = seed;
    cfg.num_samples = 1;
    return glauber_sample(params_, cfg)[0];
  }

 private:
  ModelParams params_;
  SamplerConfig cfg_;
  bool exact_ = false;
  std::int64_t n_ = 0;
  std::vector<double> cdf_;
};

// Fills decisions[r] = reject? for every replicate of one arm, splitting the
// replicate range across threads. Seeds depend only on (base, cell, arm, r).
void run_arm(const ReplicateSampler& smp, const TestSpec& test, double beta,
             const CouplingMatrix& coupling, const SignalClass& cls, double A,
             std::uint64_t base_seed, std::int64_t cell_id, std::int64_t arm,
             std::int64_t replicates, int threads, std::vector<char>& decisions) {
  decisions.assign(replicates, 0);
  auto work = [&](std::int64_t first, std::int64_t stride) {
    for (std::int64_t r = first; r < replicates; r += stride) {
      std::uint64_t seed = derive_seed(base_seed, cell_id, arm * replicates + r);
      SpinConfig x = smp.draw(seed);
      decisions[r] = run_test(test, x, beta, coupling, cls, A).reject ? 1 : 0;
    }
  };
  int workers = static_cast<int>(std::min<std::int64_t>(threads, replicates));
  if (workers <= 1) {
    work(0, 1);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  for (auto& t : pool) t.join();
}

double fraction(const std::vector<char>& decisions) {
  std::int64_t hits = 0;
  for (char d : decisions) hits += d;
  return static_cast<double>(hits) / static_cast<double>(decisions.size());
}

}  // namespace

RiskEstimate estimate_risk(const TestSpec& test, const NullModel& null_model,
                           const AlternativeSpec& alt, std::int64_t replicates,
                           const SamplerConfig& sampler, std::uint64_t base_seed,
                           std::int64_t cell_id, bool exhaustive_type2, int threads) {
  if (replicates < 1) throw std::invalid_argument("estimate_risk: replicates must be >= 1");
  const SignalClass& cls = alt.signal_class;
  cls.validate();
  if (cls.n != null_model.coupling.n)
    throw std::invalid_argument("estimate_risk: class/coupling size mismatch");
  if (!(alt.A > 0.0)) throw std::invalid_argument("estimate_risk: A must be > 0");

  RiskEstimate est;
  est.replicates = replicates;
  est.base_seed = base_seed;
  est.cell_id = cell_id;

  const double beta = null_model.beta;
  std::vector<char> decisions;

  ModelParams null_params{beta, null_model.coupling, {}};
  ReplicateSampler null_smp(null_params, sampler);
  run_arm(null_smp, test, beta, null_model.coupling, cls, alt.A, base_seed, cell_id,
          /*arm=*/0, replicates, threads, decisions);
  est.type1 = fraction(decisions);
  est.type1_se = binomial_se(est.type1, replicates);

  const std::int64_t num_sets = exhaustive_type2 ? cls.count() : 1;
  est.type2 = -1.0;
  for (std::int64_t j = 0; j < num_sets; ++j) {
    ModelParams alt_params{beta, null_model.coupling,
                           field_vector(cls.n, cls.sets[j], alt.A)};
    ReplicateSampler alt_smp(alt_params, sampler);
    run_arm(alt_smp, test, beta, null_model.coupling, cls, alt.A, base_seed, cell_id,
            /*arm=*/j + 1, replicates, threads, decisions);
    double accept = 1.0 - fraction(decisions);
    if (accept > est.type2) {
      est.type2 = accept;
      est.type2_se = binomial_se(accept, replicates);
      est.worst_set = j;
    }
  }
  est.risk = est.type1 + est.type2;
  return est;
}

double exact_rejection_probability(const TestSpec& test, const ModelParams& params,
                                   const SignalClass& cls, double A,
                                   Conditioning conditioning) {
  const std::int64_t n = params.n();
  ExactDistribution dist = exact_distribution(params);
  const std::int64_t states = std::int64_t(1) << n;
  KahanSum total, hit;
  for (std::int64_t s = 0; s < states; ++s) {
    if (conditioning == Conditioning::NonnegativeMagnetization &&
        2 * std::popcount(static_cast<std::uint64_t>(s)) < n)
      continue;
    total.add(dist.prob[s]);
    SpinConfig x = SpinConfig::from_bits(n, static_cast<std::uint64_t>(s));
    if (run_test(test, x, params.beta, params.coupling, cls, A).reject)
      hit.add(dist.prob[s]);
  }
  if (total.value() <= 0.0)
    throw std::logic_error("exact_rejection_probability: empty conditioned support");
  return hit.value() / total.value();
}

RiskEstimate exact_risk(const TestSpec& test, const NullModel& null_model,
                        const AlternativeSpec& alt, bool exhaustive_type2,
                        Conditioning conditioning) {
  const SignalClass& cls = alt.signal_class;
  cls.validate();
  if (cls.n != null_model.coupling.n)
    throw std::invalid_argument("exact_risk: class/coupling size mismatch");
  if (!(alt.A > 0.0)) throw std::invalid_argument("exact_risk: A must be > 0");

  RiskEstimate est;
  ModelParams null_params{null_model.beta, null_model.coupling, {}};
  est.type1 = exact_rejection_probability(test, null_params, cls, alt.A, conditioning);
  const std::int64_t num_sets = exhaustive_type2 ? cls.count() : 1;
  est.type2 = -1.0;
  for (std::int64_t j = 0; j < num_sets; ++j) {
    ModelParams alt_params{null_model.beta, null_model.coupling,
                           field_vector(cls.n, cls.sets[j], alt.A)};
    double accept =
        1.0 - exact_rejection_probability(test, alt_params, cls, alt.A, conditioning);
    if (accept > est.type2) {
      est.type2 = accept;
      est.worst_set = j;
    }
  }
  est.risk = est.type1 + est.type2;
  return est;
}

double calibrate_magnetization_cutoff(const NullModel& null_model, std::int64_t replicates,
                                      double quantile, const SamplerConfig& sampler,
                                      std::uint64_t base_seed, std::int64_t cell_id) {
  if (replicates < 1)
    throw std::invalid_argument("calibrate_magnetization_cutoff: replicates must be >= 1");
  if (!(quantile > 0.0 && quantile < 1.0))
    throw std::invalid_argument("calibrate_magnetization_cutoff: quantile in (0,1)");
  ModelParams params{null_model.beta, null_model.coupling, {}};
  ReplicateSampler smp(params, sampler);
  const double scale = std::pow(static_cast<double>(null_model.coupling.n), 0.25);
  std::vector<double> stats(replicates);
  for (std::int64_t r = 0; r < replicates; ++r) {
    std::uint64_t seed = derive_seed(base_seed, cell_id, r);
    stats[r] = scale * smp.draw(seed).mean();
  }
  std::sort(stats.begin(), stats.end());
  return quantile_sorted(stats, quantile);
}

void SweepGrid::validate() const {
  if (betas.empty() || s_values.empty() || A_values.empty() || tests.empty())
    throw std::invalid_argument("SweepGrid: every axis (betas, s, A, tests) must be nonempty");
  if (replicates < 100)
    throw std::invalid_argument("SweepGrid: replicates must be >= 100");
  if (class_count < 1) throw std::invalid_argument("SweepGrid: class_count must be >= 1");
  if (threads < 1) throw std::invalid_argument("SweepGrid: threads must be >= 1");
  for (auto s : s_values)
    if (s < 1) throw std::invalid_argument("SweepGrid: s values must be >= 1");
  for (double a : A_values)
    if (!(a > 0.0)) throw std::invalid_argument("SweepGrid: A values must be > 0");
}

const char* const kRiskCsvHeader =
    "graph,n,beta,s,A,tanhA,test,type1,type1_se,type2,type2_se,risk,replicates,seed";

std::string RiskRecord::csv_row() const {
  std::ostringstream out;
  out << graph_id << ',' << n << ',' << format_double(beta) << ',' << s << ','
      << format_double(A) << ',' << format_double(tanh_A) << ',' << test << ','
      << format_double(estimate.type1) << ',' << format_double(estimate.type1_se) << ','
      << format_double(estimate.type2) << ',' << format_double(estimate.type2_se) << ','
      << format_double(estimate.risk) << ',' << estimate.replicates << ',' << seed;
  return out.str();
}

std::string RiskRecord::json_line() const {
  nlohmann::ordered_json j;
  j["graph"] = graph_id;
  j["n"] = n;
  j["beta"] = beta;
  j["s"] = s;
  j["A"] = A;
  j["tanhA"] = tanh_A;
  j["test"] = test;
  j["type1"] = estimate.type1;
  j["type1_se"] = estimate.type1_se;
  j["type2"] = estimate.type2;
  j["type2_se"] = estimate.type2_se;
  j["risk"] = estimate.risk;
  j["replicates"] = estimate.replicates;
  j["seed"] = seed;
  j["cell"] = cell_id;
  return j.dump();
}

namespace {

// Counts data rows of an existing sweep CSV, insisting on a matching header.
std::int64_t existing_rows(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) return -1;  // no file yet
  std::string line;
  if (!std::getline(in, line)) return 0;  // empty file: treat as fresh
  if (line != kRiskCsvHeader)
    throw std::runtime_error("boundary_sweep: existing CSV has a different header: " +
                             csv_path);
  std::int64_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;
}

// Keeps the JSON mirror in lockstep with the CSV on resume.
void truncate_json_lines(const std::string& json_path, std::int64_t keep) {
  std::ifstream in(json_path);
  if (!in) return;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  in.close();
  if (static_cast<std::int64_t>(lines.size()) <= keep) return;
  std::ofstream out(json_path, std::ios::trunc);
  for (std::int64_t k = 0; k < keep; ++k) out << lines[k] << '\n';
}

}  // namespace

std::vector<RiskRecord> boundary_sweep(const SweepGrid& grid, const std::string& csv_path,
                                       const std::string& json_path) {
  grid.validate();
  AdjacencyMatrix adj = build_graph(grid.graph);
  CouplingMatrix coupling = coupling_from_graph(adj, grid.scaling);
  const std::int64_t n = coupling.n;

  std::int64_t skip = existing_rows(csv_path);
  const bool fresh = skip < 0;
  if (fresh) skip = 0;
  if (!json_path.empty()) truncate_json_lines(json_path, skip);

  std::ofstream csv(csv_path, std::ios::app);
  if (!csv) throw std::runtime_error("boundary_sweep: cannot open " + csv_path);
  if (fresh) csv << kRiskCsvHeader << '\n' << std::flush;
  std::ofstream json;
  if (!json_path.empty()) {
    json.open(json_path, std::ios::app);
    if (!json) throw std::runtime_error("boundary_sweep: cannot open " + json_path);
  }

  // Class construction per sparsity value.
  auto class_for = [&](std::int64_t s) {
    if (grid.lattice_class) {
      if (grid.graph.family != GraphFamily::Lattice)
        throw std::invalid_argument("boundary_sweep: lattice_class needs a lattice graph");
      SignalClass cube = make_lattice_cube_class(grid.graph.dim, grid.graph.side, s);
      if (grid.min_separation > 0)
        return disjoint_subcollection(cube, grid.min_separation);
      return cube;
    }
    return make_mean_field_class(n, s, grid.class_count, /*disjoint=*/true);
  };

  std::vector<RiskRecord> records;
  std::int64_t cell_id = 0;
  for (const TestSpec& test : grid.tests)
    for (double beta : grid.betas)
      for (std::int64_t s : grid.s_values) {
        SignalClass cls = class_for(s);
        for (double a_value : grid.A_values) {
          const std::int64_t cell = cell_id++;
          if (cell < skip) continue;
          double A = grid.A_is_tanh ? field_from_tanh(a_value) : a_value;
          NullModel null_model{beta, coupling};
          AlternativeSpec alt{cls, A};
          RiskEstimate est =
              estimate_risk(test, null_model, alt, grid.replicates, grid.sampler,
                            grid.base_seed, cell, grid.exhaustive_type2, grid.threads);
          RiskRecord rec;
          rec.graph_id = grid.graph.id();
          rec.n = n;
          rec.beta = beta;
          rec.s = cls.s;
          rec.A = A;
          rec.tanh_A = std::tanh(A);
          rec.test = test_kind_name(test.kind);
          rec.estimate = est;
          rec.seed = grid.base_seed;
          rec.cell_id = cell;
          if (json.is_open()) json << rec.json_line() << '\n' << std::flush;
          csv << rec.csv_row() << '\n' << std::flush;
          if (!csv) throw std::runtime_error("boundary_sweep: write failed on " + csv_path);
          records.push_back(std::move(rec));
        }
      }
  return records;
}

const char* boundary_regime_name(BoundaryRegime regime) {
  switch (regime) {
    case BoundaryRegime::Impossible: return "impossible";
    case BoundaryRegime::RateSqrtLogNOverS: return "rate_sqrt_logn_over_s";
    case BoundaryRegime::RateNQuarterOverS: return "rate_n_quarter_over_s";
  }
  return "unknown";
}

BoundaryPrediction predicted_boundary(double beta, std::int64_t n, std::int64_t s,
                                      GraphFamily family, double c, double C) {
  if (beta < 0.0) throw std::invalid_argument("predicted_boundary: beta must be >= 0");
  if (n < 2 || s < 1) throw std::invalid_argument("predicted_boundary: need n >= 2, s >= 1");
  BoundaryPrediction out;
  out.c = c;
  out.C = C;
  const double logn = std::log(static_cast<double>(n));
  const double sf = static_cast<double>(s);
  std::ostringstream cond;
  if (family == GraphFamily::Lattice)
    cond << "[lattice graph: critical-regime branch is a mean-field statement] ";

  if (sf <= c * logn) {
    out.regime = BoundaryRegime::Impossible;
    out.rate = 0.0;
    cond << "s <= c*log n (" << sf << " <= " << c * logn
         << "): sets this sparse cannot be detected by any test";
    out.conditions = cond.str();
    return out;
  }
  const bool narrow = sf < C * logn;
  if (beta != 1.0) {
    out.regime = BoundaryRegime::RateSqrtLogNOverS;
    out.rate = std::sqrt(logn / sf);
    cond << (beta < 1.0 ? "high-temperature" : "low-temperature (conditioned analysis)")
         << " branch, s > c*log n: tanh(A) scale sqrt(log n / s)";
  } else {
    const double s_star = std::sqrt(static_cast<double>(n)) / logn;
    if (sf >= s_star) {
      out.regime = BoundaryRegime::RateNQuarterOverS;
      out.rate = std::pow(static_cast<double>(n), 0.25) / sf;
      cond << "critical branch, s >= sqrt(n)/log n (" << sf << " >= " << s_star
           << "): tanh(A) scale n^{1/4}/s";
    } else {
      out.regime = BoundaryRegime::RateSqrtLogNOverS;
      out.rate = std::sqrt(logn / sf);
      cond << "critical branch, s < sqrt(n)/log n (" << sf << " < " << s_star
           << "): tanh(A) scale sqrt(log n / s)";
    }
  }
  if (narrow)
    cond << "; note: c*log n < s < C*log n sits between the proven regimes, nearest rate reported";
  out.conditions = cond.str();
  return out;
}

double field_from_tanh(double target) {
  if (!(target > 0.0)) throw std::invalid_argument("field_from_tanh: target must be > 0");
  const double cap = 1.0 - 1e-12;
  return std::atanh(std::min(target, cap));
}

}  // namespace ising
