#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sepsim/evolved_state.hpp"
#include "sepsim/percolation.hpp"
#include "sepsim/rng.hpp"

namespace sepsim {

enum class AngleDist { FixedPi, Uniform };

/// One timestep applies gamma_u two-site gates between uniformly random
/// distinct pairs, then gamma_m measure-and-reset events on uniformly random
/// spins. The dimensionless measurement rate is g = gamma_m / (2 gamma_u).
struct DynamicsParams {
  uint32_t gamma_u = 1;
  uint32_t gamma_m = 1;
  GateMode mode = GateMode::Clifford;
  AngleDist angle_dist = AngleDist::FixedPi;
  uint64_t burn_in_timesteps = 1;
  uint64_t master_seed = 1;
  bool interleave_events = false;  // shuffle gates and measurements within a timestep

  double g() const { return gamma_m / (2.0 * gamma_u); }
  void validate() const;
};

/// Smallest-denominator integer rates with gamma_m = 2 g gamma_u for the
/// requested g; falls back to max_gamma_u with rounding if g is not a small
/// rational multiple.
DynamicsParams params_for_g(double g, uint32_t max_gamma_u = 256);

/// Timesteps after which every spin has been measured at least `depth` times
/// on average; the transient decays as exp(-Gamma_m t).
uint64_t default_burn_in(uint32_t n, const DynamicsParams& params, double depth = 12.0);

/// Histogram over node degrees; s(k) is the density of nodes of degree k-1.
struct DegreeHistogram {
  std::vector<uint64_t> counts;  // counts[d] = nodes of degree d
  uint64_t total = 0;

  double s(uint32_t k) const {
    if (k == 0 || k > counts.size()) return 0.0;
    return static_cast<double>(counts[k - 1]) / total;
  }
  double s1() const { return s(1); }
  double mean_degree() const;
};

DegreeHistogram degree_distribution(const EvolvedState& state);

struct TrajectoryRecord {
  uint64_t timestep = 0;
  double mt = 0.0;  // measurement events per spin up to this snapshot
  DegreeHistogram degrees;
  ClusterStats clusters;
  double mean_spin_entropy = 0.0;  // 1 - s_1, the stabilizer single-spin entropy
};

void advance_timestep(EvolvedState& state, const DynamicsParams& params, Rng& rng);

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // final record is the steady-state sample
  EvolvedState final_state;
  Rng rng;  // stream position after the run, for follow-on sampling
};

/// Runs burn_in_timesteps of dynamics with the stream derived from
/// (master_seed, traj_index). cadence > 0 also records the transient every
/// `cadence` timesteps starting at t = 0; the final record is always present.
Trajectory run_trajectory(uint32_t n, const DynamicsParams& params, uint64_t snapshot_cadence,
                          uint64_t traj_index = 0);

struct EnsembleStats {
  uint64_t count = 0;
  std::vector<double> sum, sumsq;

  double mean(size_t i) const { return sum[i] / count; }
  double stderr_of_mean(size_t i) const;
  size_t width() const { return sum.size(); }
};

using TrajectorySampler = std::function<std::vector<double>(const Trajectory&)>;

/// Seeded, embarrassingly parallel ensemble. Per-trajectory streams come from
/// (master_seed, index); reduction runs over fixed trajectory blocks in index
/// order, so the aggregate is bitwise independent of the thread count.
EnsembleStats run_ensemble(uint32_t n, const DynamicsParams& params, uint64_t n_traj,
                           uint32_t n_threads, uint64_t snapshot_cadence,
                           const TrajectorySampler& sampler);

}  // namespace sepsim
