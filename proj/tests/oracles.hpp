// Independent reference computations used only by tests: a direct integrator
// for the degree rate equation, contour-integral series extraction from the
// generating function, quadrature for the incomplete gamma ratio, and random
// circuit generators with replayable operation logs.
#pragma once

#include <cstdint>
#include <vector>

#include "sepsim/dense_oracle.hpp"
#include "sepsim/evolved_state.hpp"
#include "sepsim/rng.hpp"

namespace sepsim::oracles {

/// RK4 integration of ds_k/dtau = (s_{k-1} - s_k) + g k (s_{k+1} - s_k)
/// + g delta_{k,1}, s_k(0) = delta_{k,1}, truncated at k_max.
/// Returns s_1..s_{k_max} (index 0 holds s_1).
std::vector<double> integrate_rate_equation(double g, double tau_end, uint32_t k_max,
                                            double dt = 2e-4);

/// Exact fixed point of the truncated rate equation via a dense linear solve
/// with the normalization sum_k s_k = 1.
std::vector<double> rate_equation_steady_state(double g, uint32_t k_max);

/// Series coefficient s_k(tau) extracted from the closed-form generating
/// function by a trapezoidal contour integral at |z| = radius.
double generating_function_coefficient(double g, double tau, uint32_t k,
                                       uint32_t m_points = 2048, double radius = 0.75);

/// Regularized upper incomplete gamma ratio by composite-Simpson quadrature
/// of its integral definition.
double regularized_gamma_q_quadrature(uint32_t k, double a);

/// A replayable random circuit: gates and measure-and-reset steps with the
/// recorded outcomes, plus the evolved-state result of applying them.
struct LoggedCircuit {
  std::vector<SimOp> ops;
  EvolvedState state;
};

/// Random CZ/measure dynamics in clifford mode.
LoggedCircuit random_clifford_circuit(uint32_t n, uint32_t n_events, double measure_fraction,
                                      Rng& rng);
/// Random commuting-gate dynamics with uniform angles in iqp mode.
LoggedCircuit random_iqp_circuit(uint32_t n, uint32_t n_events, double measure_fraction,
                                 Rng& rng);
/// Uniform random spanning tree with random angles (iqp mode).
EvolvedState random_tree_state(uint32_t n, Rng& rng);

/// Replays a logged circuit into the dense oracle with forced outcomes.
DenseState replay_dense(const LoggedCircuit& circuit);

}  // namespace sepsim::oracles
