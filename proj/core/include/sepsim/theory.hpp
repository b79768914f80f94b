#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace sepsim::theory {

/// Critical measurement rate g_c of the separability transition.
inline constexpr double kGCritical = 2.0 / 3.0;

/// Regularized upper incomplete gamma ratio Gamma(k, a) / Gamma(k) for
/// integer k >= 1: equals exp(-a) * sum_{j<k} a^j / j!.
double regularized_gamma_q(uint32_t k, double a);

/// Steady-state density of degree-(k-1) nodes: g * [1 - Gamma(k, 1/g)/Gamma(k)].
double steady_state_sk(double g, uint32_t k);

/// Time-dependent density of degree-(k-1) nodes, tau = 2*Gamma_u*t
/// (so g*tau equals measurement events per spin).
double sk_at_time(double g, uint32_t k, double tau);

/// Mean single-spin entanglement entropy in bits at measurement depth
/// mt = Gamma_m * t (measurement events per spin): equals 1 - s_1(t).
double single_spin_entropy(double g, double mt);

/// The mt -> infinity limit of single_spin_entropy: 1 - g(1 - exp(-1/g)).
double steady_spin_entropy(double g);

/// Generating function F(z, tau) = sum_k z^k s_k(tau), |z| <= 1.
double generating_function(double g, double z, double tau);

/// Steady-state generating function f(z) = z*g/(1-z) * [1 - exp(-(1-z)/g)].
double generating_function_steady(double g, double z);

/// Mean size of the cluster containing a random spin, 1/(1 - g_c/g);
/// nullopt when it diverges (g <= g_c).
std::optional<double> mean_cluster_size(double g);

/// Smallest root q in [0, 1) of
///   q(1-q)^2 + 2g[exp(-(1-q)/g)(1-q+g) - g] = 0,
/// the probability that a bond-followed node lies in a finite cluster.
/// Returns 1 when no root below 1 exists (g >= g_c).
double solve_root_q(double g);

/// Fraction of spins in the giant entangled cluster:
/// m = 1 - (g/(1-q))(1 - exp(-(1-q)/g)); zero for g >= g_c.
double giant_mass(double g);

/// Upper bound on steady-or-transient entanglement entropy density S_A/N for
/// a random subsystem of fraction q_frac <= 1/2 at measurement depth mt:
///   q[1 - exp(-(1 - exp(-mt))(1-q)/(2g))].
double entanglement_upper_bound(double q_frac, double g, double mt);

/// Steady-state degree law Q_k of a random node and P_k of a node reached by
/// following a random bond, truncated where s_{k+1} drops below tail_tol.
struct NeighborDistributions {
  std::vector<double> q;  // q[k] = s_{k+1}, k >= 0
  std::vector<double> p;  // p[k] = 2g k s_{k+1}, k >= 0
};
NeighborDistributions neighbor_distributions(double g, double tail_tol = 1e-15);

}  // namespace sepsim::theory
