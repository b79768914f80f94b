#pragma once

#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sepsim/gf2.hpp"
#include "sepsim/rng.hpp"

namespace sepsim {

enum class GateMode {
  Clifford,        // CZ gates only; theta entries in {0, pi}, exact toggling
  Iqp,             // generic commuting diagonal gates, arbitrary angles
  IdealizedGraph,  // thermodynamic-limit rule: a gate always leaves a bond
};

/// A subset of qubits and (implicitly) its complement.
class Bipartition {
 public:
  Bipartition(std::vector<uint32_t> subset_a, uint32_t n);
  const std::vector<uint32_t>& subset_a() const { return a_; }
  uint32_t num_qubits() const { return n_; }

 private:
  std::vector<uint32_t> a_;  // sorted, unique
  uint32_t n_;
};

/// The evolving wavefunction of commuting-gate dynamics with measure-and-reset:
/// a symmetric angle matrix theta (zero diagonal) plus linear phases w, both
/// reduced mod 2pi. Nonzero theta entries form the support graph whose
/// connectivity carries all separability information.
///
/// Clifford and idealized-graph modes store theta/pi and w/pi as bits;
/// iqp mode stores sparse double-precision angles per node.
class EvolvedState {
 public:
  /// Angles within this distance of a multiple of 2pi are snapped to zero so
  /// the support graph stays well defined under roundoff.
  static constexpr double kAngleSnapTol = 1e-9;

  /// Product state |-> ... ->|: theta = 0, w = 0.
  EvolvedState(uint32_t n, GateMode mode);

  uint32_t num_qubits() const { return n_; }
  GateMode mode() const { return mode_; }

  /// Adds `angle` to theta_ij (and ji), reduced mod 2pi. Clifford mode
  /// requires angle = pi (a CZ) and toggles the bond; idealized-graph mode
  /// marks the bond present regardless of prior state.
  void apply_two_qubit_gate(uint32_t i, uint32_t j, double angle);
  void apply_cz(uint32_t i, uint32_t j);

  /// Projective Z measurement of qubit k followed by reset to |->.
  /// The outcome is a fair coin; on outcome 1 each neighbor i picks up
  /// w_i += theta_ki. All bonds at k are removed and w_k = 0.
  /// Returns the outcome (0 or 1).
  int measure_z_and_reset(uint32_t k, Rng& rng);

  double theta(uint32_t i, uint32_t j) const;
  double w(uint32_t i) const;
  bool has_edge(uint32_t i, uint32_t j) const;
  uint32_t degree(uint32_t i) const { return degree_[i]; }
  uint64_t num_edges() const { return num_edges_; }
  std::vector<uint32_t> neighbors(uint32_t i) const;

  /// Exact bipartite entanglement entropy in bits: GF(2) rank of the
  /// off-diagonal adjacency block between A and its complement.
  /// Clifford mode only.
  uint32_t bipartite_entropy_clifford(const Bipartition& cut) const;

  /// True iff no theta entry crosses the cut (valid in every mode).
  bool is_separable(const Bipartition& cut) const;

  /// Connected components of the support graph; each component sorted,
  /// components ordered by smallest member.
  std::vector<std::vector<uint32_t>> connected_components() const;

  /// Visits every edge (i, j) with i < j.
  template <class F>
  void for_each_edge(F&& f) const {
    if (bitform()) {
      for (uint32_t i = 0; i < n_; ++i) {
        const uint64_t* row = adj_.row(i);
        for (uint32_t wi = i / 64; wi * 64 < n_; ++wi) {
          uint64_t word = row[wi];
          if (wi == i / 64) word &= ~((uint64_t{2} << (i % 64)) - 1);  // j > i
          while (word) {
            const uint32_t j = wi * 64 + std::countr_zero(word);
            word &= word - 1;
            f(i, j);
          }
        }
      }
    } else {
      for (uint32_t i = 0; i < n_; ++i) {
        for (const auto& [j, angle] : theta_map_[i]) {
          if (j > i) f(i, j);
        }
      }
    }
  }

  /// Validates the representation invariants; throws std::logic_error on
  /// violation. Test helper.
  void check_invariants() const;

 private:
  bool bitform() const { return mode_ != GateMode::Iqp; }
  void validate_pair(uint32_t i, uint32_t j) const;

  uint32_t n_;
  GateMode mode_;
  uint64_t num_edges_ = 0;
  std::vector<uint32_t> degree_;

  // Clifford / idealized-graph storage: theta = pi * adj, w = pi * wbit.
  BitMatrix adj_;
  std::vector<uint8_t> wbit_;

  // Iqp storage: sparse symmetric angle matrix, per-node maps.
  std::vector<std::unordered_map<uint32_t, double>> theta_map_;
  std::vector<double> w_;
};

/// Reduces an angle to [0, 2pi), snapping values within
/// EvolvedState::kAngleSnapTol of a multiple of 2pi to exactly zero.
double reduce_angle(double x);

}  // namespace sepsim
