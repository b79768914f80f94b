#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sepsim/evolved_state.hpp"
#include "sepsim/gf2.hpp"
#include "sepsim/rng.hpp"

namespace sepsim {

enum class PauliAxis : uint8_t { X, Y, Z };

/// An n-qubit Pauli operator i^phase * prod_j P_j with packed X/Z bits.
/// Hermitian operators have phase 0 (+1) or 2 (-1).
struct Pauli {
  uint32_t n = 0;
  std::vector<uint64_t> x, z;
  uint8_t phase = 0;

  static Pauli identity(uint32_t n);
  static Pauli single(uint32_t n, uint32_t qubit, PauliAxis axis);
  /// Parses e.g. "XZZXI", "-XIY", "+ZZ".
  static Pauli from_string(uint32_t n, std::string_view s);

  bool x_bit(uint32_t q) const { return (x[q / 64] >> (q % 64)) & 1; }
  bool z_bit(uint32_t q) const { return (z[q / 64] >> (q % 64)) & 1; }
  void set_x(uint32_t q, bool v);
  void set_z(uint32_t q, bool v);
};

/// Aaronson-Gottesman style stabilizer tableau: n destabilizer and n
/// stabilizer generators over the binary symplectic representation with a
/// phase per row. Destabilizer phases are not maintained.
class StabilizerTableau {
 public:
  /// |+...+>: stabilizers X_i, destabilizers Z_i.
  static StabilizerTableau plus_state(uint32_t n);
  /// |0...0>: stabilizers Z_i, destabilizers X_i.
  static StabilizerTableau zero_state(uint32_t n);
  /// Graph state with signs: stabilizer m is (-1)^{w_m/pi} X_m prod Z over
  /// the neighbors of m. Clifford-mode states only.
  static StabilizerTableau from_graph_state(const EvolvedState& state);

  uint32_t num_qubits() const { return n_; }

  /// Measures a single-qubit Pauli; returns +1 or -1. Deterministic when the
  /// operator is in the stabilizer group, otherwise a fair coin plus the
  /// anticommuting-generator replacement update.
  int measure_pauli(uint32_t qubit, PauliAxis axis, Rng& rng);
  /// Measures an arbitrary Pauli operator.
  int measure_pauli(const Pauli& op, Rng& rng);
  /// Projects onto the +1 eigenspace of op; throws if the state is in the
  /// -1 eigenspace. Used to prepare code states in tests.
  void postselect(const Pauli& op);

  /// Stabilizer entanglement entropy in bits:
  /// rank of the stabilizer rows restricted to subset a, minus |a|.
  uint32_t subsystem_entropy(std::span<const uint32_t> a) const;
  /// I(A:B) = S_A + S_B - S_AB for disjoint subsets.
  uint32_t mutual_information(std::span<const uint32_t> a, std::span<const uint32_t> b) const;

  Pauli stabilizer(uint32_t i) const;
  Pauli destabilizer(uint32_t i) const;

  /// Commutation, independence and pairing invariants; throws std::logic_error.
  void check_valid() const;

 private:
  explicit StabilizerTableau(uint32_t n);

  uint32_t words() const { return (n_ + 63) / 64; }
  // Row layout: [0, n) destabilizers, [n, 2n) stabilizers.
  bool anticommutes_row(uint32_t row, const Pauli& op) const;
  void multiply_row_by_row(uint32_t dst, uint32_t src);
  void multiply_pauli_by_row(Pauli& dst, uint32_t src) const;
  template <class AntiPred, class WriteOp>
  int measure_impl(const AntiPred& anti, const WriteOp& write, uint8_t op_phase, Rng* rng,
                   bool force_plus);

  uint32_t n_;
  BitMatrix x_, z_;
  std::vector<uint8_t> phase_;
};

struct EntanglingPowerResult {
  uint32_t i_before = 0;
  uint32_t i_after = 0;
  int delta = 0;
};

enum class MeasureBasisMode { PauliX, RandomPerQubit };

/// The entangling-power protocol: I(a:b) of the graph state, then every other
/// qubit measured (ascending index) in Pauli X or a per-qubit random basis,
/// then I(a:b) again.
EntanglingPowerResult entangling_power_experiment(const EvolvedState& state, uint32_t a,
                                                  uint32_t b, MeasureBasisMode basis, Rng& rng);

}  // namespace sepsim
