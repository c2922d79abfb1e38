#include "ising/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "ising/oracle.hpp"
#include "ising/risk.hpp"
#include "ising/signals.hpp"
#include "ising/util.hpp"

namespace ising {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: field `" + path + "`: " + what);
}

std::string join_path(const std::string& section, const char* key) {
  return section.empty() ? key : section + "." + key;
}

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) { known = true; break; }
    if (!known)
      throw std::invalid_argument("config: unknown key `" +
                                  join_path(section, item.key().c_str()) + "`");
  }
}

double get_double(const json& o, const char* k, const std::string& sec, double dflt) {
  if (!o.contains(k)) return dflt;
  if (!o[k].is_number()) fail(join_path(sec, k), "expected a number");
  return o[k].get<double>();
}

std::int64_t get_int(const json& o, const char* k, const std::string& sec, std::int64_t dflt) {
  if (!o.contains(k)) return dflt;
  if (!o[k].is_number_integer()) fail(join_path(sec, k), "expected an integer");
  return o[k].get<std::int64_t>();
}

std::uint64_t get_u64(const json& o, const char* k, const std::string& sec, std::uint64_t dflt) {
  if (!o.contains(k)) return dflt;
  if (!o[k].is_number_unsigned() && !o[k].is_number_integer())
    fail(join_path(sec, k), "expected a nonnegative integer");
  if (o[k].is_number_integer() && o[k].get<std::int64_t>() < 0)
    fail(join_path(sec, k), "expected a nonnegative integer");
  return o[k].get<std::uint64_t>();
}

bool get_bool(const json& o, const char* k, const std::string& sec, bool dflt) {
  if (!o.contains(k)) return dflt;
  if (!o[k].is_boolean()) fail(join_path(sec, k), "expected true/false");
  return o[k].get<bool>();
}

std::string get_string(const json& o, const char* k, const std::string& sec,
                       const std::string& dflt) {
  if (!o.contains(k)) return dflt;
  if (!o[k].is_string()) fail(join_path(sec, k), "expected a string");
  return o[k].get<std::string>();
}

std::vector<double> get_double_list(const json& o, const char* k, const std::string& sec) {
  if (!o.contains(k)) return {};
  if (!o[k].is_array()) fail(join_path(sec, k), "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : o[k]) {
    if (!v.is_number()) fail(join_path(sec, k), "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::int64_t> get_int_list(const json& o, const char* k, const std::string& sec) {
  if (!o.contains(k)) return {};
  if (!o[k].is_array()) fail(join_path(sec, k), "expected an array of integers");
  std::vector<std::int64_t> out;
  for (const auto& v : o[k]) {
    if (!v.is_number_integer()) fail(join_path(sec, k), "expected an array of integers");
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

std::vector<std::string> get_string_list(const json& o, const char* k, const std::string& sec) {
  if (!o.contains(k)) return {};
  if (!o[k].is_array()) fail(join_path(sec, k), "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : o[k]) {
    if (!v.is_string()) fail(join_path(sec, k), "expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

const char* family_name_cli(GraphFamily f) {
  switch (f) {
    case GraphFamily::Complete: return "complete";
    case GraphFamily::RegularCirculant: return "regular_circulant";
    case GraphFamily::RandomRegular: return "random_regular";
    case GraphFamily::ErdosRenyi: return "erdos_renyi";
    case GraphFamily::Lattice: return "lattice";
  }
  return "unknown";
}

GraphFamily family_from(const std::string& s, const std::string& path) {
  if (s == "complete") return GraphFamily::Complete;
  if (s == "regular_circulant") return GraphFamily::RegularCirculant;
  if (s == "random_regular") return GraphFamily::RandomRegular;
  if (s == "erdos_renyi") return GraphFamily::ErdosRenyi;
  if (s == "lattice") return GraphFamily::Lattice;
  fail(path, "unknown graph family `" + s + "`");
}

TestKind kind_from(const std::string& s, const std::string& path) {
  if (s == "conditional_scan") return TestKind::ConditionalScan;
  if (s == "naive_scan") return TestKind::NaiveScan;
  if (s == "magnetization") return TestKind::Magnetization;
  fail(path, "unknown test kind `" + s + "`");
}

InitState init_from(const std::string& s, const std::string& path) {
  if (s == "uniform") return InitState::UniformRandom;
  if (s == "all_plus") return InitState::AllPlus;
  if (s == "all_minus") return InitState::AllMinus;
  fail(path, "unknown init state `" + s + "`");
}

const char* init_name(InitState s) {
  switch (s) {
    case InitState::UniformRandom: return "uniform";
    case InitState::AllPlus: return "all_plus";
    case InitState::AllMinus: return "all_minus";
  }
  return "unknown";
}

}  // namespace

RunConfig parse_config(const std::string& text, bool require_seed) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
  check_keys(root, "", {"seed", "subcommand", "threads", "out", "json_out", "graph",
                        "model", "signal", "test", "sampler", "sweep", "oracle",
                        "predict"});

  RunConfig cfg;
  if (root.contains("seed")) {
    cfg.seed = get_u64(root, "seed", "", 0);
    cfg.seed_set = true;
  } else if (require_seed) {
    throw std::invalid_argument(
        "config: missing required field `seed` (runs must be deterministic)");
  }
  cfg.subcommand = get_string(root, "subcommand", "", "");
  cfg.threads = static_cast<int>(get_int(root, "threads", "", 0));
  cfg.out = get_string(root, "out", "", "");
  cfg.json_out = get_string(root, "json_out", "", "");

  if (root.contains("graph")) {
    const json& g = root["graph"];
    if (!g.is_object()) fail("graph", "expected an object");
    check_keys(g, "graph", {"family", "n", "d", "p", "dim", "side", "range", "seed"});
    cfg.graph.family = family_from(get_string(g, "family", "graph", "complete"),
                                   "graph.family");
    cfg.graph.n = get_int(g, "n", "graph", cfg.graph.n);
    cfg.graph.d = static_cast<int>(get_int(g, "d", "graph", cfg.graph.d));
    cfg.graph.p = get_double(g, "p", "graph", cfg.graph.p);
    cfg.graph.dim = static_cast<int>(get_int(g, "dim", "graph", cfg.graph.dim));
    cfg.graph.side = static_cast<int>(get_int(g, "side", "graph", cfg.graph.side));
    cfg.graph.range = static_cast<int>(get_int(g, "range", "graph", cfg.graph.range));
    cfg.graph.seed = get_u64(g, "seed", "graph", cfg.graph.seed);
  }

  if (root.contains("model")) {
    const json& m = root["model"];
    if (!m.is_object()) fail("model", "expected an object");
    check_keys(m, "model", {"beta", "scaling"});
    cfg.beta = get_double(m, "beta", "model", cfg.beta);
    std::string sc = get_string(m, "scaling", "model", "mean_field");
    if (sc == "mean_field") cfg.scaling = Scaling::MeanField;
    else if (sc == "raw") cfg.scaling = Scaling::Raw;
    else fail("model.scaling", "expected `mean_field` or `raw`");
  }

  if (root.contains("signal")) {
    const json& s = root["signal"];
    if (!s.is_object()) fail("signal", "expected an object");
    check_keys(s, "signal",
               {"s", "count", "disjoint", "lattice_cubes", "min_separation", "seed"});
    cfg.s = get_int(s, "s", "signal", cfg.s);
    cfg.class_count = get_int(s, "count", "signal", cfg.class_count);
    cfg.disjoint = get_bool(s, "disjoint", "signal", cfg.disjoint);
    cfg.lattice_cubes = get_bool(s, "lattice_cubes", "signal", cfg.lattice_cubes);
    cfg.min_separation = get_int(s, "min_separation", "signal", cfg.min_separation);
    cfg.class_seed = get_u64(s, "seed", "signal", cfg.class_seed);
  }

  if (root.contains("test")) {
    const json& t = root["test"];
    if (!t.is_object()) fail("test", "expected an object");
    check_keys(t, "test", {"kind", "delta", "eta", "cutoff_mode", "cutoff", "A",
                           "set_index"});
    cfg.test.kind = kind_from(get_string(t, "kind", "test", "conditional_scan"),
                              "test.kind");
    cfg.test.delta = get_double(t, "delta", "test", cfg.test.delta);
    cfg.test.eta = get_double(t, "eta", "test", cfg.test.eta);
    std::string cm = get_string(t, "cutoff_mode", "test", "calibrated");
    if (cm == "calibrated") cfg.test.cutoff_mode = MagnetizationCutoff::Calibrated;
    else if (cm == "lemma") cfg.test.cutoff_mode = MagnetizationCutoff::LemmaForm;
    else fail("test.cutoff_mode", "expected `calibrated` or `lemma`");
    cfg.test.cutoff_param = get_double(t, "cutoff", "test", cfg.test.cutoff_param);
    cfg.A = get_double(t, "A", "test", cfg.A);
    cfg.set_index = get_int(t, "set_index", "test", cfg.set_index);
  }

  if (root.contains("sampler")) {
    const json& s = root["sampler"];
    if (!s.is_object()) fail("sampler", "expected an object");
    check_keys(s, "sampler",
               {"burn_in", "thinning", "num_samples", "init", "condition_nonneg_mag"});
    cfg.sampler.burn_in = get_int(s, "burn_in", "sampler", cfg.sampler.burn_in);
    cfg.sampler.thinning = get_int(s, "thinning", "sampler", cfg.sampler.thinning);
    cfg.sampler.num_samples = get_int(s, "num_samples", "sampler", cfg.sampler.num_samples);
    cfg.sampler.init = init_from(get_string(s, "init", "sampler", "uniform"), "sampler.init");
    cfg.sampler.condition_nonneg_mag =
        get_bool(s, "condition_nonneg_mag", "sampler", cfg.sampler.condition_nonneg_mag);
  }

  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    if (!s.is_object()) fail("sweep", "expected an object");
    check_keys(s, "sweep", {"betas", "s_values", "A_values", "A_is_tanh", "tests",
                            "replicates", "exhaustive_type2"});
    cfg.sweep_betas = get_double_list(s, "betas", "sweep");
    cfg.sweep_s = get_int_list(s, "s_values", "sweep");
    cfg.sweep_A = get_double_list(s, "A_values", "sweep");
    cfg.sweep_A_is_tanh = get_bool(s, "A_is_tanh", "sweep", cfg.sweep_A_is_tanh);
    cfg.sweep_tests = get_string_list(s, "tests", "sweep");
    cfg.replicates = get_int(s, "replicates", "sweep", cfg.replicates);
    cfg.exhaustive_type2 = get_bool(s, "exhaustive_type2", "sweep", cfg.exhaustive_type2);
  }

  if (root.contains("oracle")) {
    const json& o = root["oracle"];
    if (!o.is_object()) fail("oracle", "expected an object");
    check_keys(o, "oracle", {"mode", "instances", "tol", "B", "A", "limit", "sets"});
    cfg.oracle_mode = get_string(o, "mode", "oracle", cfg.oracle_mode);
    cfg.instances = get_int(o, "instances", "oracle", cfg.instances);
    cfg.tol = get_double(o, "tol", "oracle", cfg.tol);
    cfg.B = get_double(o, "B", "oracle", cfg.B);
    cfg.oracle_A = get_double(o, "A", "oracle", cfg.oracle_A);
    cfg.limit_mode = get_bool(o, "limit", "oracle", cfg.limit_mode);
    if (o.contains("sets")) {
      if (!o["sets"].is_array()) fail("oracle.sets", "expected an array of index arrays");
      for (const auto& row : o["sets"]) {
        if (!row.is_array()) fail("oracle.sets", "expected an array of index arrays");
        std::vector<std::int32_t> S;
        for (const auto& v : row) {
          if (!v.is_number_integer()) fail("oracle.sets", "indices must be integers");
          S.push_back(v.get<std::int32_t>());
        }
        cfg.oracle_sets.push_back(std::move(S));
      }
    }
  }

  if (root.contains("predict")) {
    const json& p = root["predict"];
    if (!p.is_object()) fail("predict", "expected an object");
    check_keys(p, "predict", {"beta", "n", "s", "c", "C"});
    cfg.predict_beta = get_double(p, "beta", "predict", cfg.predict_beta);
    cfg.predict_n = get_int(p, "n", "predict", cfg.predict_n);
    cfg.predict_s = get_int(p, "s", "predict", cfg.predict_s);
    cfg.regime_c = get_double(p, "c", "predict", cfg.regime_c);
    cfg.regime_C = get_double(p, "C", "predict", cfg.regime_C);
  }
  return cfg;
}

std::string RunConfig::to_json() const {
  ordered_json j;
  j["subcommand"] = subcommand;
  if (seed_set) j["seed"] = seed;
  j["threads"] = threads;
  j["out"] = out;
  j["json_out"] = json_out;
  j["graph"] = {{"family", family_name_cli(graph.family)}, {"n", graph.n},
                {"d", graph.d},  {"p", graph.p},           {"dim", graph.dim},
                {"side", graph.side}, {"range", graph.range}, {"seed", graph.seed}};
  j["model"] = {{"beta", beta},
                {"scaling", scaling == Scaling::MeanField ? "mean_field" : "raw"}};
  j["signal"] = {{"s", s}, {"count", class_count}, {"disjoint", disjoint},
                 {"lattice_cubes", lattice_cubes}, {"min_separation", min_separation},
                 {"seed", class_seed}};
  j["test"] = {{"kind", test_kind_name(test.kind)},
               {"delta", test.delta},
               {"eta", test.eta},
               {"cutoff_mode",
                test.cutoff_mode == MagnetizationCutoff::Calibrated ? "calibrated" : "lemma"},
               {"cutoff", test.cutoff_param},
               {"A", A},
               {"set_index", set_index}};
  j["sampler"] = {{"burn_in", sampler.burn_in},
                  {"thinning", sampler.thinning},
                  {"num_samples", sampler.num_samples},
                  {"init", init_name(sampler.init)},
                  {"condition_nonneg_mag", sampler.condition_nonneg_mag}};
  j["sweep"] = {{"betas", sweep_betas},       {"s_values", sweep_s},
                {"A_values", sweep_A},        {"A_is_tanh", sweep_A_is_tanh},
                {"tests", sweep_tests},       {"replicates", replicates},
                {"exhaustive_type2", exhaustive_type2}};
  j["oracle"] = {{"mode", oracle_mode}, {"instances", instances}, {"tol", tol},
                 {"B", B},              {"A", oracle_A},          {"limit", limit_mode},
                 {"sets", oracle_sets}};
  j["predict"] = {{"beta", predict_beta}, {"n", predict_n}, {"s", predict_s},
                  {"c", regime_c},        {"C", regime_C}};
  return j.dump(2);
}

int resolve_threads(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("ISING_SCAN_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

SignalClass build_class(const RunConfig& cfg, std::int64_t n) {
  if (cfg.lattice_cubes) {
    if (cfg.graph.family != GraphFamily::Lattice)
      throw std::invalid_argument("signal.lattice_cubes requires a lattice graph");
    SignalClass cls = make_lattice_cube_class(cfg.graph.dim, cfg.graph.side, cfg.s);
    if (cfg.min_separation > 0) cls = disjoint_subcollection(cls, cfg.min_separation);
    return cls;
  }
  return make_mean_field_class(n, cfg.s, cfg.class_count, cfg.disjoint, cfg.class_seed);
}

SpinConfig draw_one(const ModelParams& params, const SamplerConfig& sampler,
                    std::uint64_t seed) {
  if (params.n() <= kExactEnumerationCap) return exact_sample(params, 1, seed)[0];
  SamplerConfig cfg = sampler;
  cfg.seed = seed;
  cfg.num_samples = 1;
  return glauber_sample(params, cfg)[0];
}

int run_graph_cmd(const RunConfig& cfg) {
  AdjacencyMatrix adj = build_graph(cfg.graph);
  CouplingMatrix coupling = coupling_from_graph(adj, cfg.scaling);
  GraphStats stats = graph_stats(coupling);
  ordered_json j;
  j["id"] = cfg.graph.id();
  j["n"] = stats.n;
  j["num_edges"] = adj.num_edges();
  j["avg_degree"] = stats.avg_degree;
  j["max_degree"] = stats.max_degree;
  j["degree_irregularity"] = stats.degree_irregularity;
  j["inf_norm"] = stats.inf_norm;
  j["lambda2"] = stats.lambda2;
  j["lambda_min"] = stats.lambda_min;
  j["alpha_n"] = stats.alpha_n();
  std::cout << j.dump(2) << '\n';
  if (!cfg.out.empty()) {
    save_edge_list(adj, cfg.out);
    std::cerr << "edge list written to " << cfg.out << '\n';
  } else {
    std::cerr << "no --out path given; edge list not written\n";
  }
  return 0;
}

int run_sample_cmd(const RunConfig& cfg) {
  AdjacencyMatrix adj = build_graph(cfg.graph);
  ModelParams params{cfg.beta, coupling_from_graph(adj, cfg.scaling), {}};
  if (cfg.set_index >= 0) {
    SignalClass cls = build_class(cfg, params.n());
    params.field = alternative_field({cls, cfg.A}, cfg.set_index);
  }
  SamplerConfig sampler = cfg.sampler;
  sampler.seed = cfg.seed;
  std::vector<SpinConfig> samples = glauber_sample(params, sampler);
  if (!cfg.out.empty()) {
    save_samples(samples, params.n(), cfg.seed, cfg.out);
    std::cerr << "sample dump written to " << cfg.out << '\n';
  } else {
    std::cout << params.n() << ' ' << samples.size() << ' ' << cfg.seed << '\n';
    for (const auto& x : samples) std::cout << x.to_hex() << '\n';
  }
  return 0;
}

int run_test_cmd(const RunConfig& cfg) {
  AdjacencyMatrix adj = build_graph(cfg.graph);
  CouplingMatrix coupling = coupling_from_graph(adj, cfg.scaling);
  SignalClass cls = build_class(cfg, coupling.n);
  ModelParams params{cfg.beta, coupling, {}};
  if (cfg.set_index >= 0)
    params.field = alternative_field({cls, cfg.A}, cfg.set_index);
  SpinConfig x = draw_one(params, cfg.sampler, cfg.seed);
  TestResult res = run_test(cfg.test, x, cfg.beta, coupling, cls, cfg.A);
  ordered_json j;
  j["kind"] = test_kind_name(res.kind);
  j["statistic"] = res.statistic;
  j["threshold"] = res.threshold;
  j["reject"] = res.reject;
  j["argmax_set"] = res.argmax_set;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_oracle_cmd(const RunConfig& cfg) {
  const std::string& mode = cfg.oracle_mode;
  if (mode == "verify") {
    InequalityReport rep = verify_inequalities(cfg.instances, cfg.seed, cfg.tol);
    std::cout << rep.to_json() << '\n';
    return rep.total_violations() == 0 ? 0 : 1;
  }
  if (mode == "second-moment" || mode == "second_moment") {
    AdjacencyMatrix adj = build_graph(cfg.graph);
    ModelParams null_params{cfg.beta, coupling_from_graph(adj, cfg.scaling), {}};
    std::vector<std::vector<std::int32_t>> sets = cfg.oracle_sets;
    if (sets.empty()) sets = build_class(cfg, null_params.n()).sets;
    std::int64_t s = static_cast<std::int64_t>(sets.at(0).size());
    SecondMomentMode m = cfg.limit_mode ? SecondMomentMode::LimitAInfinity
                                        : SecondMomentMode::FiniteA;
    SecondMomentReport rep = second_moment_mixture(null_params, sets, s, cfg.oracle_A, m);
    ordered_json j;
    j["value"] = rep.value;
    j["k"] = rep.k;
    j["A"] = rep.A;
    j["mode"] = rep.mode == SecondMomentMode::FiniteA ? "finite_A" : "limit_A_infinity";
    j["terms"] = rep.terms;
    j["notes"] = rep.notes;
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  if (mode == "fixed-point" || mode == "fixed_point") {
    FixedPoint fp = fixed_point(cfg.beta, cfg.B);
    ordered_json j;
    j["t"] = fp.t;
    j["regime"] = fp.regime == FixedPointRegime::High     ? "high"
                  : fp.regime == FixedPointRegime::Critical ? "critical"
                                                            : "low";
    j["phi_prime"] = fp.phi_prime;
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  throw std::invalid_argument("oracle: unknown mode `" + mode +
                              "` (want verify | second-moment | fixed-point)");
}

int run_sweep_cmd(const RunConfig& cfg) {
  SweepGrid grid;
  grid.graph = cfg.graph;
  grid.scaling = cfg.scaling;
  grid.betas = cfg.sweep_betas;
  grid.s_values = cfg.sweep_s;
  grid.A_values = cfg.sweep_A;
  grid.A_is_tanh = cfg.sweep_A_is_tanh;
  for (const auto& name : cfg.sweep_tests) {
    TestSpec t = cfg.test;
    t.kind = kind_from(name, "sweep.tests");
    grid.tests.push_back(t);
  }
  grid.class_count = cfg.class_count;
  grid.lattice_class = cfg.lattice_cubes;
  grid.min_separation = cfg.min_separation;
  grid.replicates = cfg.replicates;
  grid.sampler = cfg.sampler;
  grid.base_seed = cfg.seed;
  grid.exhaustive_type2 = cfg.exhaustive_type2;
  grid.threads = resolve_threads(cfg.threads);
  const std::string csv = cfg.out.empty() ? "sweep.csv" : cfg.out;
  std::vector<RiskRecord> records = boundary_sweep(grid, csv, cfg.json_out);
  std::cout << "completed " << records.size() << " cells into " << csv << '\n';
  return 0;
}

int run_predict_cmd(const RunConfig& cfg) {
  double beta = cfg.predict_beta >= 0.0 ? cfg.predict_beta : cfg.beta;
  std::int64_t n = cfg.predict_n > 0 ? cfg.predict_n : cfg.graph.n;
  std::int64_t s = cfg.predict_s > 0 ? cfg.predict_s : cfg.s;
  BoundaryPrediction p =
      predicted_boundary(beta, n, s, cfg.graph.family, cfg.regime_c, cfg.regime_C);
  ordered_json j;
  j["regime"] = boundary_regime_name(p.regime);
  j["rate"] = p.rate;
  j["conditions"] = p.conditions;
  j["c"] = p.c;
  j["C"] = p.C;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  std::cerr << "resolved config:\n" << cfg.to_json() << '\n';
  if (!cfg.seed_set)
    throw std::invalid_argument("run: a seed is required (config `seed` or --seed)");
  const std::string& sub = cfg.subcommand;
  if (sub == "graph") return run_graph_cmd(cfg);
  if (sub == "sample") return run_sample_cmd(cfg);
  if (sub == "test") return run_test_cmd(cfg);
  if (sub == "oracle") return run_oracle_cmd(cfg);
  if (sub == "sweep") return run_sweep_cmd(cfg);
  if (sub == "predict") return run_predict_cmd(cfg);
  throw std::invalid_argument("run: unknown subcommand `" + sub + "`");
}

}  // namespace ising
