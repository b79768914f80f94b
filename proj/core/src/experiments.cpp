#include "sepsim/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sepsim/iqp.hpp"
#include "sepsim/percolation.hpp"
#include "sepsim/tableau.hpp"
#include "sepsim/theory.hpp"
#include "sepsim/version.hpp"

namespace sepsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kExperiments = {
    "spin-entropy",    "cluster-mass",     "cluster-distribution", "susceptibility",
    "entangling-power", "collapse",        "iqp-return-prob"};

std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

/// RFC-4180 writer: CRLF records, UTF-8, '.' decimal separator.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  size_t column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("csv: missing column '" + name + "'");
  }
};

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + path.string());
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(std::move(cur));
    if (table.header.empty())
      table.header = std::move(fields);
    else
      table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw std::runtime_error("csv: empty file " + path.string());
  return table;
}

DynamicsParams point_params(const ExperimentConfig& config, double g, uint32_t n,
                            uint64_t point_index) {
  DynamicsParams p = params_for_g(g);
  p.mode = config.mode;
  p.angle_dist = config.mode == GateMode::Iqp ? AngleDist::Uniform : AngleDist::FixedPi;
  p.burn_in_timesteps =
      config.burn_in_override ? config.burn_in_override : default_burn_in(n, p);
  p.master_seed = derive_seed(config.master_seed, point_index);
  return p;
}

struct OutputTracker {
  std::vector<fs::path> files;
  fs::path add(const fs::path& p) {
    files.push_back(p);
    return p;
  }
  void remove_all() {
    for (const auto& p : files) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
};

}  // namespace

GateMode parse_gate_mode(const std::string& name) {
  if (name == "clifford") return GateMode::Clifford;
  if (name == "iqp") return GateMode::Iqp;
  if (name == "idealized-graph") return GateMode::IdealizedGraph;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected clifford, iqp or idealized-graph)");
}

std::string gate_mode_name(GateMode mode) {
  switch (mode) {
    case GateMode::Clifford: return "clifford";
    case GateMode::Iqp: return "iqp";
    default: return "idealized-graph";
  }
}

void ExperimentConfig::validate() const {
  if (!kExperiments.count(experiment))
    throw std::invalid_argument("config field 'experiment': unknown experiment '" + experiment +
                                "'");
  if (experiment == "collapse") {
    if (input_csv.empty())
      throw std::invalid_argument("config field 'input': collapse needs an input CSV");
    if (exponents.empty())
      throw std::invalid_argument("config field 'exponents': collapse needs at least one a:b pair");
    return;
  }
  if (g_grid.empty())
    throw std::invalid_argument("config field 'g': at least one g value is required");
  for (double g : g_grid) {
    if (!(g > 0.0)) throw std::invalid_argument("config field 'g': g values must be positive");
  }
  if (sizes.empty())
    throw std::invalid_argument("config field 'sizes': at least one system size is required");
  for (uint32_t n : sizes) {
    if (n < 2) throw std::invalid_argument("config field 'sizes': sizes must be at least 2");
  }
  if (trajectories == 0)
    throw std::invalid_argument("config field 'traj': trajectory count must be positive");
  if (experiment == "entangling-power" && mode != GateMode::Clifford)
    throw std::invalid_argument("config field 'mode': entangling-power requires clifford mode");
  if (experiment == "iqp-return-prob" && mode != GateMode::Iqp)
    throw std::invalid_argument("config field 'mode': iqp-return-prob requires iqp mode");
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os << "experiment=" << experiment << '\n';
  os << "mode=" << gate_mode_name(mode) << '\n';
  os << "g=";
  for (size_t i = 0; i < g_grid.size(); ++i) os << (i ? "," : "") << fmt_double(g_grid[i]);
  os << '\n' << "sizes=";
  for (size_t i = 0; i < sizes.size(); ++i) os << (i ? "," : "") << sizes[i];
  os << '\n';
  os << "traj=" << trajectories << '\n';
  os << "burn_in=" << burn_in_override << '\n';
  os << "cadence=" << snapshot_cadence << '\n';
  os << "seed=" << master_seed << '\n';
  os << "input=" << input_csv << '\n';
  os << "value_column=" << value_column << '\n';
  os << "exponents=";
  for (size_t i = 0; i < exponents.size(); ++i) {
    os << (i ? "," : "") << fmt_double(exponents[i].first) << ':'
       << fmt_double(exponents[i].second);
  }
  os << '\n';
  return os.str();
}

std::string ExperimentConfig::config_hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : canonical_text()) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

/// Mean-observable experiments share this shape: one ensemble per (N, g),
/// one CSV row each.
void run_scalar_rows(const ExperimentConfig& config, OutputTracker& tracker, json& extras,
                     const std::string& file_name, const std::vector<std::string>& header,
                     const TrajectorySampler& sampler,
                     const std::function<std::vector<std::string>(
                         double g, uint32_t n, uint64_t seed, const EnsembleStats&)>& to_row) {
  CsvWriter csv(tracker.add(fs::path(config.out_dir) / file_name), header);
  uint64_t point = 0;
  for (const uint32_t n : config.sizes) {
    for (const double g : config.g_grid) {
      const DynamicsParams params = point_params(config, g, n, point++);
      const EnsembleStats stats = run_ensemble(n, params, config.trajectories, config.threads,
                                               config.snapshot_cadence, sampler);
      csv.row(to_row(g, n, params.master_seed, stats));
    }
  }
  (void)extras;
}

void run_spin_entropy(const ExperimentConfig& config, OutputTracker& tracker, json& extras) {
  run_scalar_rows(
      config, tracker, extras, "spin_entropy.csv",
      {"g", "n", "mean_spin_entropy_bits", "stderr_bits", "analytic_bits", "samples", "seed",
       "config_fnv1a"},
      [](const Trajectory& traj) {
        return std::vector<double>{traj.records.back().mean_spin_entropy};
      },
      [&](double g, uint32_t n, uint64_t seed, const EnsembleStats& stats) {
        return std::vector<std::string>{
            fmt_double(g),
            std::to_string(n),
            fmt_double(stats.mean(0)),
            fmt_double(stats.stderr_of_mean(0)),
            fmt_double(theory::steady_spin_entropy(g)),
            std::to_string(stats.count),
            std::to_string(seed),
            config.config_hash()};
      });
}

void run_cluster_mass(const ExperimentConfig& config, OutputTracker& tracker, json& extras) {
  run_scalar_rows(
      config, tracker, extras, "cluster_mass.csv",
      {"g", "n", "m_mean", "m_stderr", "analytic_m", "samples", "seed", "config_fnv1a"},
      [](const Trajectory& traj) {
        return std::vector<double>{traj.records.back().clusters.m};
      },
      [&](double g, uint32_t n, uint64_t seed, const EnsembleStats& stats) {
        return std::vector<std::string>{
            fmt_double(g),
            std::to_string(n),
            fmt_double(stats.mean(0)),
            fmt_double(stats.stderr_of_mean(0)),
            fmt_double(theory::giant_mass(g)),
            std::to_string(stats.count),
            std::to_string(seed),
            config.config_hash()};
      });
}

void run_susceptibility(const ExperimentConfig& config, OutputTracker& tracker, json& extras) {
  run_scalar_rows(
      config, tracker, extras, "susceptibility.csv",
      {"g", "n", "chi_mean", "chi_stderr", "samples", "seed", "config_fnv1a"},
      [](const Trajectory& traj) {
        return std::vector<double>{traj.records.back().clusters.chi};
      },
      [&](double g, uint32_t n, uint64_t seed, const EnsembleStats& stats) {
        return std::vector<std::string>{
            fmt_double(g),
            std::to_string(n),
            fmt_double(stats.mean(0)),
            fmt_double(stats.stderr_of_mean(0)),
            std::to_string(stats.count),
            std::to_string(seed),
            config.config_hash()};
      });
}

void run_entangling_power(const ExperimentConfig& config, OutputTracker& tracker, json& extras) {
  run_scalar_rows(
      config, tracker, extras, "entangling_power.csv",
      {"g", "n", "delta_i_mean_bits", "delta_i_stderr_bits", "i_before_mean_bits",
       "i_after_mean_bits", "samples", "seed", "config_fnv1a"},
      [](const Trajectory& traj) {
        Rng rng = traj.rng;
        const uint32_t n = traj.final_state.num_qubits();
        const uint32_t a = static_cast<uint32_t>(uniform_below(rng, n));
        uint32_t b = static_cast<uint32_t>(uniform_below(rng, n - 1));
        if (b >= a) ++b;
        const EntanglingPowerResult res =
            entangling_power_experiment(traj.final_state, a, b, MeasureBasisMode::PauliX, rng);
        return std::vector<double>{static_cast<double>(res.delta),
                                   static_cast<double>(res.i_before),
                                   static_cast<double>(res.i_after)};
      },
      [&](double g, uint32_t n, uint64_t seed, const EnsembleStats& stats) {
        return std::vector<std::string>{
            fmt_double(g),
            std::to_string(n),
            fmt_double(stats.mean(0)),
            fmt_double(stats.stderr_of_mean(0)),
            fmt_double(stats.mean(1)),
            fmt_double(stats.mean(2)),
            std::to_string(stats.count),
            std::to_string(seed),
            config.config_hash()};
      });
}

void run_cluster_distribution(const ExperimentConfig& config, OutputTracker& tracker,
                              json& extras) {
  CsvWriter csv(tracker.add(fs::path(config.out_dir) / "cluster_distribution.csv"),
                {"g", "n", "k", "nk_mean", "nk_stderr", "samples", "seed", "config_fnv1a"});
  extras["fits"] = json::array();
  uint64_t point = 0;
  for (const uint32_t n : config.sizes) {
    for (const double g : config.g_grid) {
      const DynamicsParams params = point_params(config, g, n, point++);
      const EnsembleStats stats = run_ensemble(
          n, params, config.trajectories, config.threads, 0, [n](const Trajectory& traj) {
            std::vector<double> nk = traj.records.back().clusters.nk;
            nk.resize(n + 1, 0.0);
            return nk;
          });
      std::vector<double> nk_mean(stats.width());
      for (size_t k = 0; k < stats.width(); ++k) nk_mean[k] = stats.mean(k);
      for (uint32_t k = 1; k <= n; ++k) {
        if (stats.sum[k] == 0.0) continue;
        csv.row({fmt_double(g), std::to_string(n), std::to_string(k), fmt_double(nk_mean[k]),
                 fmt_double(stats.stderr_of_mean(k)), std::to_string(stats.count),
                 std::to_string(params.master_seed), config.config_hash()});
      }
      json fit_info{{"g", g}, {"n", n}};
      try {
        const PowerLawFit fit = fit_power_law(nk_mean);
        fit_info["tau_hat"] = fit.tau_hat;
        fit_info["tau_stderr"] = fit.tau_stderr;
        fit_info["bins_used"] = fit.bins_used;
        fit_info["cutoff_dominated"] = fit.cutoff_dominated;
      } catch (const std::exception& e) {
        fit_info["fit_error"] = e.what();
      }
      extras["fits"].push_back(fit_info);
    }
  }
}

void run_iqp_return_prob(const ExperimentConfig& config, OutputTracker& tracker, json& extras) {
  CsvWriter csv(tracker.add(fs::path(config.out_dir) / "iqp_return_prob.csv"),
                {"g", "n", "samples", "exact_feasible_fraction", "mean_log10_p_tree",
                 "mean_log10_p_exact_feasible", "mean_abs_dev_log10_feasible",
                 "cyclic_node_fraction", "seed", "config_fnv1a"});
  uint64_t point = 0;
  for (const uint32_t n : config.sizes) {
    for (const double g : config.g_grid) {
      const DynamicsParams params = point_params(config, g, n, point++);
      const EnsembleStats stats = run_ensemble(
          n, params, config.trajectories, config.threads, 0, [](const Trajectory& traj) {
            const EvolvedState& st = traj.final_state;
            const SymmetrizedState sym = ising_symmetrize(st);
            const auto comps = st.connected_components();
            bool feasible = true;
            double cyclic_nodes = 0.0;
            for (const auto& comp : comps) {
              if (comp.size() > 24) feasible = false;
              if (component_has_cycle(st, comp)) cyclic_nodes += comp.size();
            }
            const double log_tree = tree_formula_log10(st);
            double log_exact = 0.0, dev = 0.0;
            if (feasible) {
              log_exact = return_probability_bruteforce_log10(sym);
              dev = std::abs(log_tree - log_exact);
            }
            return std::vector<double>{feasible ? 1.0 : 0.0, log_tree,
                                       feasible ? log_exact : 0.0, feasible ? dev : 0.0,
                                       cyclic_nodes / st.num_qubits()};
          });
      const double feasible_count = stats.sum[0];
      const bool any = feasible_count > 0.0;
      csv.row({fmt_double(g), std::to_string(n), std::to_string(stats.count),
               fmt_double(stats.mean(0)), fmt_double(stats.mean(1)),
               any ? fmt_double(stats.sum[2] / feasible_count) : "",
               any ? fmt_double(stats.sum[3] / feasible_count) : "", fmt_double(stats.mean(4)),
               std::to_string(params.master_seed), config.config_hash()});
    }
  }
  (void)extras;
}

void run_collapse(const ExperimentConfig& config, OutputTracker& tracker, json& extras) {
  const CsvTable table = read_csv(config.input_csv);
  std::string value_col = config.value_column;
  if (value_col.empty()) {
    for (const auto& name : table.header) {
      if (name.find("_mean") != std::string::npos) {
        value_col = name;
        break;
      }
    }
    if (value_col.empty())
      throw std::runtime_error("collapse: no *_mean column found in " + config.input_csv);
  }
  const size_t cg = table.column("g");
  const size_t cn = table.column("n");
  const size_t cy = table.column(value_col);
  std::vector<CollapseObs> data;
  for (const auto& row : table.rows) {
    data.push_back({std::stod(row[cg]), std::stod(row[cn]), std::stod(row[cy])});
  }

  extras["value_column"] = value_col;
  extras["scores"] = json::array();
  for (size_t i = 0; i < config.exponents.size(); ++i) {
    const auto [a, b] = config.exponents[i];
    const double score = collapse_quality(data, a, b);
    const std::string name = "collapse_" + std::to_string(i) + ".csv";
    CsvWriter csv(tracker.add(fs::path(config.out_dir) / name),
                  {"x", "y", "n", "g", "config_fnv1a"});
    for (const auto& p : collapse_points(data, a, b)) {
      csv.row({fmt_double(p.x), fmt_double(p.y), fmt_double(p.n), fmt_double(p.g),
               config.config_hash()});
    }
    extras["scores"].push_back(json{{"a", a}, {"b", b}, {"score", score}, {"file", name}});
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);
  const auto start = std::chrono::steady_clock::now();

  OutputTracker tracker;
  json extras = json::object();
  try {
    if (config.experiment == "spin-entropy") {
      run_spin_entropy(config, tracker, extras);
    } else if (config.experiment == "cluster-mass") {
      run_cluster_mass(config, tracker, extras);
    } else if (config.experiment == "cluster-distribution") {
      run_cluster_distribution(config, tracker, extras);
    } else if (config.experiment == "susceptibility") {
      run_susceptibility(config, tracker, extras);
    } else if (config.experiment == "entangling-power") {
      run_entangling_power(config, tracker, extras);
    } else if (config.experiment == "collapse") {
      run_collapse(config, tracker, extras);
    } else {
      run_iqp_return_prob(config, tracker, extras);
    }
  } catch (...) {
    tracker.remove_all();
    throw;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ExperimentResult result;
  for (const auto& p : tracker.files) result.csv_files.push_back(p.string());
  result.wall_seconds = wall;

  json manifest;
  manifest["experiment"] = config.experiment;
  manifest["code_version"] = kVersion;
  manifest["seed"] = config.master_seed;
  manifest["config_fnv1a"] = config.config_hash();
  manifest["config"] = config.canonical_text();
  manifest["threads"] = config.threads;
  manifest["wall_seconds"] = wall;
  manifest["files"] = result.csv_files;
  if (!extras.empty()) manifest["extras"] = extras;

  const fs::path manifest_path =
      fs::path(config.out_dir) / (config.experiment + "_manifest.json");
  std::ofstream out(manifest_path);
  if (!out) throw std::runtime_error("cannot write manifest " + manifest_path.string());
  out << manifest.dump(2) << '\n';
  result.manifest_file = manifest_path.string();
  return result;
}

}  // namespace sepsim
