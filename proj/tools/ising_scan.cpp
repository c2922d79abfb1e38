// Command-line front end: subcommands graph | sample | test | oracle | sweep |
// predict, driven by a JSON config file with flag overrides (flags > file >
// defaults). Every run requires a seed and echoes its resolved config.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ising/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising signal-detection laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // let global options (--seed, --config, ...) follow the subcommand

  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  app.add_option("--config", config_path, "JSON config file")->expected(1);
  auto* seed_opt = app.add_option("--seed", seed, "base seed (required here or in config)");
  auto* threads_opt = app.add_option("--threads", threads, "worker thread cap");
  auto* out_opt = app.add_option("--out", out, "primary output path");

  // Shared model overrides, registered on the parent so every subcommand can
  // use them; unset options leave the config value alone.
  double beta = 0.0, delta = 0.0, eta = 0.0, A = 0.0, B = 0.0, tol = 0.0;
  double regime_c = 0.0, regime_C = 0.0, p_edge = 0.0, pbeta = 0.0;
  std::int64_t n = 0, s = 0, d = 0, dim = 0, side = 0, range = 0;
  std::int64_t count = 0, num_samples = 0, burn_in = -2, thinning = -1;
  std::int64_t instances = 0, replicates = 0, set_index = -2, pn = 0, ps = 0;
  std::string family, kind, oracle_mode;

  auto* family_opt = app.add_option("--family", family, "graph family");
  auto* n_opt = app.add_option("--n", n, "vertex count");
  auto* d_opt = app.add_option("--d", d, "degree (regular families)");
  auto* p_opt = app.add_option("--p", p_edge, "edge probability");
  auto* dim_opt = app.add_option("--dim", dim, "lattice dimension");
  auto* side_opt = app.add_option("--side", side, "lattice side");
  auto* range_opt = app.add_option("--range", range, "lattice interaction range");
  auto* beta_opt = app.add_option("--beta", beta, "inverse temperature");
  auto* s_opt = app.add_option("--s", s, "signal sparsity");
  auto* count_opt = app.add_option("--count", count, "signal sets per class");

  auto* cmd_graph = app.add_subcommand("graph", "emit edge list and graph statistics");

  auto* cmd_sample = app.add_subcommand("sample", "draw Glauber samples, emit hex dump");
  auto* sm_num = cmd_sample->add_option("--num-samples", num_samples, "samples to retain");
  auto* sm_burn = cmd_sample->add_option("--burn-in", burn_in, "burn-in sweeps (-1 = auto)");
  auto* sm_thin = cmd_sample->add_option("--thinning", thinning, "sweeps between samples");

  auto* cmd_test = app.add_subcommand("test", "run one detection test on a fresh draw");
  auto* t_kind = cmd_test->add_option("--kind", kind, "test kind");
  auto* t_delta = cmd_test->add_option("--delta", delta, "scan slack delta");
  auto* t_eta = cmd_test->add_option("--eta", eta, "naive-scan eta");
  auto* t_A = cmd_test->add_option("--A", A, "signal strength");
  auto* t_set = cmd_test->add_option("--set-index", set_index, "planted set (-1 = null)");

  auto* cmd_oracle = app.add_subcommand("oracle", "exact verification reports");
  cmd_oracle->add_option("mode", oracle_mode, "verify | second-moment | fixed-point");
  auto* o_instances = cmd_oracle->add_option("--instances", instances, "random instances");
  auto* o_tol = cmd_oracle->add_option("--tol", tol, "violation tolerance");
  auto* o_B = cmd_oracle->add_option("--B", B, "external field (fixed point)");
  auto* o_A = cmd_oracle->add_option("--A", A, "signal strength (second moment)");

  auto* cmd_sweep = app.add_subcommand("sweep", "risk sweep over a (beta, s, A) grid");
  auto* w_replicates = cmd_sweep->add_option("--replicates", replicates, "replicates per cell");

  // Prediction inputs shadow the shared --beta/--n/--s when given after
  // `predict`; the shared spellings still work before the subcommand.
  auto* cmd_predict = app.add_subcommand("predict", "predicted detection regime");
  auto* p_beta = cmd_predict->add_option("--beta", pbeta, "inverse temperature");
  auto* p_n = cmd_predict->add_option("--n", pn, "vertex count");
  auto* p_s = cmd_predict->add_option("--s", ps, "signal sparsity");
  auto* p_c = cmd_predict->add_option("--c", regime_c, "impossibility constant");
  auto* p_C = cmd_predict->add_option("--C", regime_C, "upper regime constant");

  CLI11_PARSE(app, argc, argv);

  try {
    ising::RunConfig cfg;
    if (!config_path.empty())
      cfg = ising::parse_config(read_file(config_path), /*require_seed=*/seed_opt->count() == 0);
    else if (seed_opt->count() == 0)
      throw std::invalid_argument("a seed is required: pass --seed or a config with `seed`");

    if (seed_opt->count() > 0) {
      cfg.seed = seed;
      cfg.seed_set = true;
    }
    if (threads_opt->count() > 0) cfg.threads = threads;
    if (out_opt->count() > 0) cfg.out = out;

    if (family_opt->count()) {
      ising::RunConfig probe =
          ising::parse_config("{\"seed\":0,\"graph\":{\"family\":\"" + family + "\"}}");
      cfg.graph.family = probe.graph.family;
    }
    if (n_opt->count()) cfg.graph.n = n;
    if (d_opt->count()) cfg.graph.d = static_cast<int>(d);
    if (p_opt->count()) cfg.graph.p = p_edge;
    if (dim_opt->count()) cfg.graph.dim = static_cast<int>(dim);
    if (side_opt->count()) cfg.graph.side = static_cast<int>(side);
    if (range_opt->count()) cfg.graph.range = static_cast<int>(range);
    if (beta_opt->count()) cfg.beta = beta;
    if (s_opt->count()) cfg.s = s;
    if (count_opt->count()) cfg.class_count = count;

    if (cmd_graph->parsed()) {
      cfg.subcommand = "graph";
    } else if (cmd_sample->parsed()) {
      cfg.subcommand = "sample";
      if (sm_num->count()) cfg.sampler.num_samples = num_samples;
      if (sm_burn->count()) cfg.sampler.burn_in = burn_in;
      if (sm_thin->count()) cfg.sampler.thinning = thinning;
    } else if (cmd_test->parsed()) {
      cfg.subcommand = "test";
      if (t_kind->count()) {
        ising::RunConfig probe =
            ising::parse_config("{\"seed\":0,\"test\":{\"kind\":\"" + kind + "\"}}");
        cfg.test.kind = probe.test.kind;
      }
      if (t_delta->count()) cfg.test.delta = delta;
      if (t_eta->count()) cfg.test.eta = eta;
      if (t_A->count()) cfg.A = A;
      if (t_set->count()) cfg.set_index = set_index;
    } else if (cmd_oracle->parsed()) {
      cfg.subcommand = "oracle";
      if (!oracle_mode.empty()) cfg.oracle_mode = oracle_mode;
      if (o_instances->count()) cfg.instances = instances;
      if (o_tol->count()) cfg.tol = tol;
      if (o_B->count()) cfg.B = B;
      if (o_A->count()) cfg.oracle_A = A;
    } else if (cmd_sweep->parsed()) {
      cfg.subcommand = "sweep";
      if (w_replicates->count()) cfg.replicates = replicates;
    } else if (cmd_predict->parsed()) {
      cfg.subcommand = "predict";
      if (p_beta->count()) cfg.predict_beta = pbeta;
      if (p_n->count()) cfg.predict_n = pn;
      if (p_s->count()) cfg.predict_s = ps;
      if (p_c->count()) cfg.regime_c = regime_c;
      if (p_C->count()) cfg.regime_C = regime_C;
    }

    return ising::run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
