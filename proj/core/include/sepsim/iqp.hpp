#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "sepsim/evolved_state.hpp"

namespace sepsim {

/// Z-basis amplitude D^{-1/2} exp[i(sum_{n<m} theta_nm s_n s_m + w.s)].
/// Works at any n; use state_vector for the full (guarded) vector.
std::complex<double> iqp_amplitude(const EvolvedState& state, std::span<const uint8_t> bits);

/// All 2^n amplitudes, basis index bit q = s_q. Guarded at n <= 24.
std::vector<std::complex<double>> iqp_state_vector(const EvolvedState& state);

/// Exact purity Tr rho_A^2 from the cross-block angles phi = theta_{A,Abar}:
///   (D_A / D^2) sum_{r,r'} prod_{i in A} [1 + cos(sum_j phi_ij (r_j - r'_j))].
/// The complement is capped at 14 qubits.
double iqp_purity(const EvolvedState& state, const Bipartition& cut);

/// The state with the Ising-restoring rotation applied: z_m = w_m +
/// (1/2) sum_n theta_mn, so <prod_m X_m> = 1.
struct SymmetrizedState {
  EvolvedState state;
  std::vector<double> z;
};
SymmetrizedState ising_symmetrize(const EvolvedState& state);

/// |<- ... <- | Phi>|^2 by exact component-wise Ising sums; every connected
/// component must have at most 24 nodes. Never forms a global 2^N sum.
double return_probability_bruteforce(const SymmetrizedState& sym);

/// One component's |2^{-m} sum_sigma exp[(i/4) sum theta sigma sigma]|^2.
double return_probability_component(const SymmetrizedState& sym,
                                    std::span<const uint32_t> component);

/// log10 of the brute-force return probability, summed per component so large
/// separable states cannot underflow.
double return_probability_bruteforce_log10(const SymmetrizedState& sym);

/// log10 of the tree-formula product over all edges (no tree check).
double tree_formula_log10(const EvolvedState& state);

/// prod_{edges} cos^2(theta_nm / 4); exact on trees. Throws if any component
/// carries a cycle.
double return_probability_tree(const SymmetrizedState& sym);

/// The same product without the tree check, for probing loop sensitivity.
double tree_formula_value(const EvolvedState& state);

/// True iff the (connected) component has at least as many edges as nodes.
bool component_has_cycle(const EvolvedState& state, std::span<const uint32_t> component);

}  // namespace sepsim
