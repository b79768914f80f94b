#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sepsim/dynamics.hpp"

namespace sepsim {

/// Declarative description of one experiment run; the CLI fills this from
/// flags and an optional config file.
struct ExperimentConfig {
  std::string experiment;  // spin-entropy, cluster-mass, cluster-distribution,
                           // susceptibility, entangling-power, collapse, iqp-return-prob
  std::vector<double> g_grid;
  std::vector<uint32_t> sizes;
  uint64_t trajectories = 100;
  uint64_t burn_in_override = 0;  // timesteps; 0 means the relaxation-based default
  uint64_t snapshot_cadence = 0;
  uint64_t master_seed = 1;
  std::string out_dir = "out";
  uint32_t threads = 0;  // 0 = hardware concurrency
  GateMode mode = GateMode::Clifford;

  // collapse-only inputs
  std::string input_csv;
  std::string value_column;  // empty = first *_mean column
  std::vector<std::pair<double, double>> exponents;

  void validate() const;
  std::string canonical_text() const;
  /// FNV-1a 64 over the canonical text, hex-encoded; stamped into every CSV.
  std::string config_hash() const;
};

struct ExperimentResult {
  std::vector<std::string> csv_files;
  std::string manifest_file;
  double wall_seconds = 0.0;
};

/// Runs the configured experiment, writing one or more RFC-4180 CSV files and
/// a JSON manifest under out_dir. CSV outputs are byte-identical across
/// reruns of the same config; partial outputs are removed on failure.
ExperimentResult run_experiment(const ExperimentConfig& config);

GateMode parse_gate_mode(const std::string& name);
std::string gate_mode_name(GateMode mode);

}  // namespace sepsim
