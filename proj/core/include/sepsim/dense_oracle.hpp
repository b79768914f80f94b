#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "sepsim/rng.hpp"

namespace sepsim {

/// Full state-vector simulator for small systems. Test oracle only: hard
/// capped at 14 qubits and never called from simulation paths.
class DenseState {
 public:
  static constexpr uint32_t kMaxQubits = 14;
  static constexpr uint32_t kMaxEntropyQubits = 10;

  /// Product state |+...+>.
  explicit DenseState(uint32_t n);

  uint32_t num_qubits() const { return n_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }
  std::complex<double> amplitude(uint64_t basis) const { return amp_[basis]; }
  double norm() const;

  void apply_two_qubit_phase(uint32_t i, uint32_t j, double angle);  // e^{i angle s_i s_j}
  void apply_single_phase(uint32_t i, double angle);                 // e^{i angle s_i}
  void apply_cz(uint32_t i, uint32_t j);
  void apply_hadamard(uint32_t i);
  void apply_s(uint32_t i);
  void apply_sdg(uint32_t i);

  /// Projective Z measurement, Born-rule outcome, renormalizes.
  int measure_z(uint32_t k, Rng& rng);
  /// Forced-outcome projection; throws if the branch has ~zero weight.
  void project_z(uint32_t k, int outcome);
  /// The X-basis reset rotation exp[i pi/4 (2s-1) Y_k] applied after a
  /// Z measurement with outcome s, returning the qubit to |+>.
  void rotate_reset(uint32_t k, int outcome);

  /// Reduced density matrix of subset A, row-major, dimension 2^|A|.
  std::vector<std::complex<double>> reduced_density_matrix(std::span<const uint32_t> a) const;
  /// Von Neumann entropy of subset A in bits (|A| <= 10).
  double subsystem_entropy_bits(std::span<const uint32_t> a) const;
  double subsystem_purity(std::span<const uint32_t> a) const;
  /// Expectation of the product of Pauli X over all qubits.
  double expectation_all_x() const;

 private:
  uint32_t n_;
  std::vector<std::complex<double>> amp_;
};

/// One step of an operation log shared between the evolved-state
/// representation and this oracle.
struct SimOp {
  enum class Kind { TwoQubitPhase, MeasureReset };
  Kind kind;
  uint32_t i = 0;
  uint32_t j = 0;
  double angle = 0.0;
  int outcome = -1;  // MeasureReset: 0/1 replays a recorded outcome, -1 samples
};

DenseState simulate_dense(uint32_t n, std::span<const SimOp> ops, Rng& rng);

}  // namespace sepsim
