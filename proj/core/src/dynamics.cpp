#include "sepsim/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace sepsim {

void DynamicsParams::validate() const {
  if (gamma_u == 0) throw std::invalid_argument("DynamicsParams: gamma_u must be positive");
  if (burn_in_timesteps == 0)
    throw std::invalid_argument("DynamicsParams: burn-in must be at least one timestep");
  if (mode != GateMode::Iqp && angle_dist != AngleDist::FixedPi)
    throw std::invalid_argument("DynamicsParams: random angles need iqp mode");
}

DynamicsParams params_for_g(double g, uint32_t max_gamma_u) {
  if (!(g >= 0.0)) throw std::invalid_argument("params_for_g: g must be non-negative");
  DynamicsParams p;
  for (uint32_t u = 1; u <= max_gamma_u; ++u) {
    const double m = 2.0 * g * u;
    const double rounded = std::round(m);
    if (std::abs(m - rounded) < 1e-9 * std::max(1.0, m)) {
      p.gamma_u = u;
      p.gamma_m = static_cast<uint32_t>(rounded);
      return p;
    }
  }
  p.gamma_u = max_gamma_u;
  p.gamma_m = static_cast<uint32_t>(std::round(2.0 * g * max_gamma_u));
  return p;
}

uint64_t default_burn_in(uint32_t n, const DynamicsParams& params, double depth) {
  if (params.gamma_m == 0) return 1;
  return static_cast<uint64_t>(std::ceil(depth * n / params.gamma_m));
}

DegreeHistogram degree_distribution(const EvolvedState& state) {
  DegreeHistogram hist;
  hist.total = state.num_qubits();
  for (uint32_t v = 0; v < state.num_qubits(); ++v) {
    const uint32_t d = state.degree(v);
    if (d >= hist.counts.size()) hist.counts.resize(d + 1, 0);
    ++hist.counts[d];
  }
  return hist;
}

double DegreeHistogram::mean_degree() const {
  double acc = 0.0;
  for (size_t d = 0; d < counts.size(); ++d) acc += static_cast<double>(d) * counts[d];
  return acc / total;
}

namespace {

double draw_gate_angle(const DynamicsParams& params, Rng& rng) {
  if (params.angle_dist == AngleDist::FixedPi) return std::numbers::pi;
  double angle;
  do {
    angle = 2.0 * std::numbers::pi * uniform_unit(rng);
  } while (reduce_angle(angle) == 0.0);
  return angle;
}

void apply_gate_event(EvolvedState& state, const DynamicsParams& params, Rng& rng) {
  const uint32_t n = state.num_qubits();
  const uint32_t i = static_cast<uint32_t>(uniform_below(rng, n));
  uint32_t j = static_cast<uint32_t>(uniform_below(rng, n - 1));
  if (j >= i) ++j;
  state.apply_two_qubit_gate(i, j, draw_gate_angle(params, rng));
}

void apply_measure_event(EvolvedState& state, Rng& rng) {
  const uint32_t k = static_cast<uint32_t>(uniform_below(rng, state.num_qubits()));
  state.measure_z_and_reset(k, rng);
}

}  // namespace

void advance_timestep(EvolvedState& state, const DynamicsParams& params, Rng& rng) {
  if (state.num_qubits() < 2)
    throw std::invalid_argument("advance_timestep: need at least two spins");
  if (!params.interleave_events) {
    for (uint32_t e = 0; e < params.gamma_u; ++e) apply_gate_event(state, params, rng);
    for (uint32_t e = 0; e < params.gamma_m; ++e) apply_measure_event(state, rng);
    return;
  }
  // Uniformly shuffled event order within the timestep.
  std::vector<uint8_t> events(params.gamma_u + params.gamma_m, 0);
  for (uint32_t e = params.gamma_u; e < events.size(); ++e) events[e] = 1;
  for (size_t i = events.size(); i > 1; --i) {
    std::swap(events[i - 1], events[uniform_below(rng, i)]);
  }
  for (const uint8_t is_measurement : events) {
    if (is_measurement)
      apply_measure_event(state, rng);
    else
      apply_gate_event(state, params, rng);
  }
}

namespace {

TrajectoryRecord snapshot(const EvolvedState& state, const DynamicsParams& params,
                          uint64_t timestep) {
  TrajectoryRecord rec;
  rec.timestep = timestep;
  rec.mt = static_cast<double>(params.gamma_m) * timestep / state.num_qubits();
  rec.degrees = degree_distribution(state);
  rec.clusters = cluster_statistics(state);
  rec.mean_spin_entropy = 1.0 - rec.degrees.s1();
  return rec;
}

}  // namespace

Trajectory run_trajectory(uint32_t n, const DynamicsParams& params, uint64_t snapshot_cadence,
                          uint64_t traj_index) {
  params.validate();
  Trajectory traj{{}, EvolvedState(n, params.mode), make_rng(params.master_seed, traj_index)};
  EvolvedState& state = traj.final_state;
  const uint64_t total = params.burn_in_timesteps;
  for (uint64_t t = 0; t < total; ++t) {
    if (snapshot_cadence > 0 && t % snapshot_cadence == 0) {
      traj.records.push_back(snapshot(state, params, t));
    }
    advance_timestep(state, params, traj.rng);
  }
  traj.records.push_back(snapshot(state, params, total));
  return traj;
}

double EnsembleStats::stderr_of_mean(size_t i) const {
  if (count < 2) return 0.0;
  const double m = mean(i);
  const double var = (sumsq[i] - count * m * m) / (count - 1);
  return var > 0.0 ? std::sqrt(var / count) : 0.0;
}

EnsembleStats run_ensemble(uint32_t n, const DynamicsParams& params, uint64_t n_traj,
                           uint32_t n_threads, uint64_t snapshot_cadence,
                           const TrajectorySampler& sampler) {
  params.validate();
  if (n_traj == 0) throw std::invalid_argument("run_ensemble: need at least one trajectory");
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());

  // Fixed-size blocks reduced in index order make the aggregate independent
  // of scheduling; threads race only for whole blocks.
  constexpr uint64_t kBlock = 32;
  const uint64_t n_blocks = (n_traj + kBlock - 1) / kBlock;
  struct BlockPartial {
    uint64_t count = 0;
    std::vector<double> sum, sumsq;
  };
  std::vector<BlockPartial> partials(n_blocks);
  std::atomic<uint64_t> next_block{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const uint64_t b = next_block.fetch_add(1);
      if (b >= n_blocks || failed.load()) break;
      try {
        BlockPartial& part = partials[b];
        const uint64_t begin = b * kBlock;
        const uint64_t end = std::min(n_traj, begin + kBlock);
        for (uint64_t idx = begin; idx < end; ++idx) {
          const Trajectory traj = run_trajectory(n, params, snapshot_cadence, idx);
          const std::vector<double> samples = sampler(traj);
          if (part.sum.empty()) {
            part.sum.assign(samples.size(), 0.0);
            part.sumsq.assign(samples.size(), 0.0);
          }
          if (samples.size() != part.sum.size())
            throw std::runtime_error("run_ensemble: sampler width changed between trajectories");
          for (size_t i = 0; i < samples.size(); ++i) {
            part.sum[i] += samples[i];
            part.sumsq[i] += samples[i] * samples[i];
          }
          ++part.count;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (uint32_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  EnsembleStats stats;
  for (const auto& part : partials) {
    if (part.count == 0) continue;
    if (stats.sum.empty()) {
      stats.sum.assign(part.sum.size(), 0.0);
      stats.sumsq.assign(part.sum.size(), 0.0);
    }
    if (part.sum.size() != stats.sum.size())
      throw std::runtime_error("run_ensemble: sampler width changed between blocks");
    for (size_t i = 0; i < part.sum.size(); ++i) {
      stats.sum[i] += part.sum[i];
      stats.sumsq[i] += part.sumsq[i];
    }
    stats.count += part.count;
  }
  return stats;
}

}  // namespace sepsim
