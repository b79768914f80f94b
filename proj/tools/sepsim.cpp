// Command-line driver: runs the simulation experiments to CSV + manifest
// files, emits finite-size-scaling collapses, and offers a quick selftest.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "sepsim/dense_oracle.hpp"
#include "sepsim/dynamics.hpp"
#include "sepsim/experiments.hpp"
#include "sepsim/iqp.hpp"
#include "sepsim/tableau.hpp"
#include "sepsim/theory.hpp"
#include "sepsim/version.hpp"

namespace {

using namespace sepsim;

struct CliOptions {
  std::vector<double> g;
  std::string g_grid;  // lo:hi:step
  std::vector<uint32_t> sizes;
  uint64_t traj = 0;
  uint64_t burn_in = 0;
  uint64_t cadence = 0;
  uint64_t seed = 1;
  uint32_t threads = 0;
  std::string out = "out";
  std::string mode = "clifford";
  std::string input;
  std::string value_column;
  std::vector<std::string> exponents;  // "a:b"
};

std::vector<double> expand_grid(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
    throw CLI::ValidationError("--g-grid expects lo:hi:step with positive step");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + 1e-12) break;
    out.push_back(v);
  }
  return out;
}

ExperimentConfig to_config(const std::string& experiment, const CliOptions& o,
                           uint64_t default_traj, std::vector<double> default_g,
                           std::vector<uint32_t> default_sizes) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.g_grid = o.g;
  if (!o.g_grid.empty()) {
    const auto grid = expand_grid(o.g_grid);
    cfg.g_grid.insert(cfg.g_grid.end(), grid.begin(), grid.end());
  }
  if (cfg.g_grid.empty()) cfg.g_grid = std::move(default_g);
  cfg.sizes = o.sizes.empty() ? std::move(default_sizes) : o.sizes;
  cfg.trajectories = o.traj ? o.traj : default_traj;
  cfg.burn_in_override = o.burn_in;
  cfg.snapshot_cadence = o.cadence;
  cfg.master_seed = o.seed;
  cfg.out_dir = o.out;
  cfg.threads = o.threads;
  cfg.mode = parse_gate_mode(o.mode);
  cfg.input_csv = o.input;
  cfg.value_column = o.value_column;
  for (const auto& pair : o.exponents) {
    double a = 0, b = 0;
    if (std::sscanf(pair.c_str(), "%lf:%lf", &a, &b) != 2)
      throw CLI::ValidationError("--exponents expects a:b");
    cfg.exponents.emplace_back(a, b);
  }
  return cfg;
}

int run_and_report(const ExperimentConfig& cfg) {
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& f : result.csv_files) std::cout << "wrote " << f << "\n";
  std::cout << "wrote " << result.manifest_file << "  (" << result.wall_seconds << " s)\n";
  return 0;
}

bool report(const char* name, bool ok) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
  return ok;
}

int run_selftest(uint32_t threads) {
  bool all = true;

  {
    double total = 0.0;
    for (uint32_t k = 1; k <= 200; ++k) total += theory::steady_state_sk(1.0, k);
    double mean_deg = 0.0;
    for (uint32_t k = 1; k <= 200; ++k) mean_deg += (k - 1) * theory::steady_state_sk(1.0, k);
    all &= report("steady-state degree law normalizes, mean degree 1/2g",
                  std::abs(total - 1.0) < 1e-9 && std::abs(mean_deg - 0.5) < 1e-9);
  }
  {
    bool ok = true;
    for (const double g : {0.8, 1.5}) {
      const auto nd = theory::neighbor_distributions(g);
      double branch = 0.0;
      for (size_t k = 0; k < nd.p.size(); ++k) branch += (static_cast<double>(k) - 1.0) * nd.p[k];
      ok &= std::abs(branch - theory::kGCritical / g) < 1e-9;
    }
    all &= report("mean branching ratio equals g_c/g", ok);
  }
  {
    const double g = 0.3;
    const double q = theory::solve_root_q(g);
    const double u = 1.0 - q;
    const double residual =
        q * u * u + 2.0 * g * (g * std::expm1(-u / g) + u * std::exp(-u / g));
    all &= report("cluster-mass root residual below 1e-12",
                  q > 0.0 && q < 1.0 && std::abs(residual) < 1e-12);
  }
  {
    DynamicsParams params = params_for_g(1.0);
    params.burn_in_timesteps = default_burn_in(64, params);
    params.master_seed = 7;
    auto sampler = [](const Trajectory& t) {
      return std::vector<double>{t.records.back().mean_spin_entropy,
                                 t.records.back().clusters.m};
    };
    const EnsembleStats serial = run_ensemble(64, params, 24, 1, 0, sampler);
    const EnsembleStats parallel = run_ensemble(64, params, 24, std::max(2u, threads), 0, sampler);
    all &= report("ensemble aggregates independent of thread count",
                  serial.sum == parallel.sum && serial.sumsq == parallel.sumsq);
  }
  {
    Rng rng = make_rng(11, 0);
    bool ok = true;
    for (int trial = 0; trial < 40 && ok; ++trial) {
      const uint32_t n = 4 + static_cast<uint32_t>(uniform_below(rng, 5));
      EvolvedState state(n, GateMode::Clifford);
      for (int e = 0; e < 12; ++e) {
        const uint32_t i = static_cast<uint32_t>(uniform_below(rng, n));
        uint32_t j = static_cast<uint32_t>(uniform_below(rng, n - 1));
        if (j >= i) ++j;
        state.apply_cz(i, j);
        if (uniform_below(rng, 3) == 0)
          state.measure_z_and_reset(static_cast<uint32_t>(uniform_below(rng, n)), rng);
      }
      const StabilizerTableau tableau = StabilizerTableau::from_graph_state(state);
      std::vector<uint32_t> a;
      for (uint32_t q = 0; q < n; ++q)
        if (coin(rng)) a.push_back(q);
      const Bipartition cut(a, n);
      ok &= state.bipartite_entropy_clifford(cut) == tableau.subsystem_entropy(a);
    }
    all &= report("graph-state rank entropy matches tableau entropy", ok);
  }
  {
    Rng rng = make_rng(13, 0);
    bool ok = true;
    for (int trial = 0; trial < 30 && ok; ++trial) {
      const uint32_t n = 3 + static_cast<uint32_t>(uniform_below(rng, 6));
      EvolvedState state(n, GateMode::Iqp);
      // random spanning tree
      for (uint32_t v = 1; v < n; ++v) {
        const uint32_t parent = static_cast<uint32_t>(uniform_below(rng, v));
        state.apply_two_qubit_gate(v, parent, 2.0 * std::numbers::pi * uniform_unit(rng));
      }
      const SymmetrizedState sym = ising_symmetrize(state);
      ok &= std::abs(return_probability_tree(sym) - return_probability_bruteforce(sym)) < 1e-10;
    }
    EvolvedState tri(3, GateMode::Iqp);
    tri.apply_two_qubit_gate(0, 1, std::numbers::pi);
    tri.apply_two_qubit_gate(0, 2, std::numbers::pi);
    tri.apply_two_qubit_gate(1, 2, std::numbers::pi);
    const SymmetrizedState sym = ising_symmetrize(tri);
    ok &= std::abs(tree_formula_value(tri) - return_probability_bruteforce(sym)) > 1e-6;
    all &= report("tree return probability exact on trees, loop-sensitive", ok);
  }
  {
    Rng rng = make_rng(17, 0);
    DynamicsParams params = params_for_g(0.8);
    params.burn_in_timesteps = default_burn_in(128, params);
    EvolvedState state(128, params.mode);
    for (uint64_t t = 0; t < params.burn_in_timesteps; ++t) advance_timestep(state, params, rng);
    const ClusterStats stats = cluster_statistics(state);
    double mass = stats.m;
    for (uint32_t k = 1; k <= 128; ++k) mass += k * stats.nk[k];
    all &= report("cluster mass balance m + sum k n_k = 1", std::abs(mass - 1.0) < 1e-12);
  }

  std::cout << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separability-transition dynamics simulator"};
  app.set_version_flag("--version", sepsim::kVersion);
  app.require_subcommand(1);

  CliOptions opts;
  struct SubSpec {
    const char* name;
    const char* help;
    uint64_t default_traj;
    std::vector<double> default_g;
    std::vector<uint32_t> default_sizes;
  };
  const std::vector<SubSpec> subs = {
      {"spin-entropy", "steady-state single-spin entropy vs g", 100,
       expand_grid("0.2:3.0:0.2"), {1000}},
      {"cluster-mass", "largest entangled cluster fraction vs g", 200,
       expand_grid("0.1:1.3:0.1"), {250, 500, 1000, 2000}},
      {"cluster-distribution", "cluster-size distribution near criticality", 10000, {0.68},
       {2000}},
      {"susceptibility", "cluster-size fluctuations chi(g, N)", 1000,
       expand_grid("0.47:0.87:0.05"), {250, 500, 1000, 2000}},
      {"entangling-power", "mean mutual-information boost from measurements", 10000,
       expand_grid("0.2:1.6:0.2"), {200}},
      {"collapse", "rescale a dataset and score the scaling collapse", 0, {}, {}},
      {"iqp-return-prob", "tree-formula vs exact return probability (iqp mode)", 200,
       expand_grid("0.8:2.4:0.4"), {48}},
  };

  std::function<int()> action;
  for (const auto& spec : subs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->set_config("--config", "", "flat key=value config file; flags win over file values");
    sub->add_option("--g", opts.g, "explicit g values (repeatable)");
    sub->add_option("--g-grid", opts.g_grid, "g grid as lo:hi:step");
    sub->add_option("--sizes", opts.sizes, "system sizes N")->delimiter(',');
    sub->add_option("--traj", opts.traj, "trajectories per (g, N) point");
    sub->add_option("--burn-in", opts.burn_in, "burn-in timesteps (0 = relaxation default)");
    sub->add_option("--cadence", opts.cadence, "snapshot cadence in timesteps");
    sub->add_option("--seed", opts.seed, "master seed");
    sub->add_option("--threads", opts.threads, "worker threads (0 = hardware)")
        ->envname("SEPSIM_THREADS");
    sub->add_option("--out", opts.out, "output directory");
    CLI::Option* mode_opt =
        sub->add_option("--mode", opts.mode, "clifford | iqp | idealized-graph");
    if (std::string(spec.name) == "collapse") {
      sub->add_option("--input", opts.input, "input CSV (g, n, <value> columns)");
      sub->add_option("--value-column", opts.value_column, "observable column name");
      sub->add_option("--exponents", opts.exponents, "exponent pair a:b (repeatable)");
    }
    sub->callback([&action, &opts, spec, mode_opt]() {
      CliOptions local = opts;
      if (std::string(spec.name) == "iqp-return-prob" && mode_opt->count() == 0)
        local.mode = "iqp";
      action = [spec, local]() {
        return run_and_report(
            to_config(spec.name, local, spec.default_traj, spec.default_g, spec.default_sizes));
      };
    });
  }

  CLI::App* selftest = app.add_subcommand("selftest", "quick internal consistency checks");
  selftest->add_option("--threads", opts.threads, "worker threads")->envname("SEPSIM_THREADS");
  selftest->callback(
      [&action, &opts]() { action = [&opts]() { return run_selftest(opts.threads ? opts.threads : 2); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return action ? action() : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
