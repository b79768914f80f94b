#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "sepsim/dense_oracle.hpp"
#include "sepsim/iqp.hpp"

using namespace sepsim;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("amplitudes of small states") {
  EvolvedState product(4, GateMode::Iqp);
  for (uint32_t b = 0; b < 16; ++b) {
    const std::vector<uint8_t> bits = {static_cast<uint8_t>(b & 1),
                                       static_cast<uint8_t>((b >> 1) & 1),
                                       static_cast<uint8_t>((b >> 2) & 1),
                                       static_cast<uint8_t>((b >> 3) & 1)};
    CHECK(std::abs(iqp_amplitude(product, bits)) == Approx(0.25).epsilon(1e-14));
  }

  EvolvedState edge(2, GateMode::Iqp);
  edge.apply_two_qubit_gate(0, 1, kPi);
  const auto a00 = iqp_amplitude(edge, std::vector<uint8_t>{0, 0});
  const auto a11 = iqp_amplitude(edge, std::vector<uint8_t>{1, 1});
  CHECK((a11 / a00).real() == Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(a11 / a00) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("state vector is normalized and matches single amplitudes") {
  Rng rng = make_rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const uint32_t n = 2 + static_cast<uint32_t>(uniform_below(rng, 9));  // up to 10
    const auto circuit = oracles::random_iqp_circuit(n, 3 * n, 0.25, rng);
    const auto vec = iqp_state_vector(circuit.state);
    double norm = 0.0;
    for (const auto& a : vec) norm += std::norm(a);
    CHECK(norm == Approx(1.0).epsilon(1e-12));

    const uint64_t probe = uniform_below(rng, uint64_t{1} << n);
    std::vector<uint8_t> bits(n);
    for (uint32_t q = 0; q < n; ++q) bits[q] = (probe >> q) & 1;
    CHECK(std::abs(vec[probe] - iqp_amplitude(circuit.state, bits)) < 1e-12);
  }
}

TEST_CASE("iqp state equals the dense oracle up to a global phase") {
  Rng rng = make_rng(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const uint32_t n = 2 + static_cast<uint32_t>(uniform_below(rng, 7));
    const auto circuit = oracles::random_iqp_circuit(n, 4 * n, 0.3, rng);
    const DenseState dense = oracles::replay_dense(circuit);
    const auto vec = iqp_state_vector(circuit.state);
    std::complex<double> overlap = 0.0;
    for (uint64_t b = 0; b < vec.size(); ++b) overlap += std::conj(dense.amplitude(b)) * vec[b];
    CHECK(std::abs(overlap) == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("purity from the cross-block formula") {
  EvolvedState sep(4, GateMode::Iqp);
  sep.apply_two_qubit_gate(0, 1, 1.1);
  sep.apply_two_qubit_gate(2, 3, 2.2);
  CHECK(iqp_purity(sep, Bipartition({0, 1}, 4)) == Approx(1.0).epsilon(1e-12));

  EvolvedState edge(2, GateMode::Iqp);
  edge.apply_two_qubit_gate(0, 1, kPi);
  CHECK(iqp_purity(edge, Bipartition({0}, 2)) == Approx(0.5).epsilon(1e-12));

  Rng rng = make_rng(7, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const uint32_t n = 2 + static_cast<uint32_t>(uniform_below(rng, 9));  // up to 10
    const auto circuit = oracles::random_iqp_circuit(n, 3 * n, 0.3, rng);
    const DenseState dense = oracles::replay_dense(circuit);
    for (uint32_t site = 0; site < n; ++site) {
      const uint32_t a[1] = {site};
      CHECK(iqp_purity(circuit.state, Bipartition({site}, n)) ==
            Approx(dense.subsystem_purity(a)).epsilon(1e-10));
    }
    // one random larger subset per circuit
    std::vector<uint32_t> subset;
    for (uint32_t q = 0; q < n; ++q) {
      if (coin(rng)) subset.push_back(q);
    }
    if (!subset.empty() && subset.size() < n) {
      CHECK(iqp_purity(circuit.state, Bipartition(subset, n)) ==
            Approx(dense.subsystem_purity(subset)).epsilon(1e-10));
    }
  }

  EvolvedState big(20, GateMode::Iqp);
  CHECK_THROWS(iqp_purity(big, Bipartition({0, 1}, 20)));  // complement 18 > 14
}

TEST_CASE("ising symmetrization") {
  EvolvedState product(3, GateMode::Iqp);
  const SymmetrizedState sp = ising_symmetrize(product);
  for (const double z : sp.z) CHECK(z == 0.0);

  EvolvedState edge(2, GateMode::Iqp);
  edge.apply_two_qubit_gate(0, 1, kPi);
  const SymmetrizedState se = ising_symmetrize(edge);
  CHECK(se.z[0] == Approx(kPi / 2).epsilon(1e-14));
  CHECK(se.z[1] == Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("symmetrized state has unit all-X expectation") {
  Rng rng = make_rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const uint32_t n = 2 + static_cast<uint32_t>(uniform_below(rng, 9));  // up to 10
    const bool clifford = coin(rng);
    const auto circuit = clifford ? oracles::random_clifford_circuit(n, 4 * n, 0.3, rng)
                                  : oracles::random_iqp_circuit(n, 4 * n, 0.3, rng);
    const SymmetrizedState sym = ising_symmetrize(circuit.state);
    DenseState dense = oracles::replay_dense(circuit);
    // U(t) = sum_s e^{-i s.z} |s><s|
    for (uint32_t q = 0; q < n; ++q) {
      if (sym.z[q] != 0.0) dense.apply_single_phase(q, -sym.z[q]);
    }
    CHECK(dense.expectation_all_x() == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("return probability on small graphs") {
  EvolvedState product(3, GateMode::Iqp);
  CHECK(return_probability_bruteforce(ising_symmetrize(product)) == Approx(1.0));

  EvolvedState edge(2, GateMode::Iqp);
  edge.apply_two_qubit_gate(0, 1, kPi);
  const SymmetrizedState se = ising_symmetrize(edge);
  CHECK(return_probability_bruteforce(se) == Approx(0.5).epsilon(1e-12));
  CHECK(return_probability_tree(se) == Approx(0.5).epsilon(1e-12));

  // star with two pi edges: cos^2(pi/4)^2 = 1/4
  EvolvedState star(3, GateMode::Iqp);
  star.apply_two_qubit_gate(0, 1, kPi);
  star.apply_two_qubit_gate(0, 2, kPi);
  const SymmetrizedState ss = ising_symmetrize(star);
  CHECK(return_probability_tree(ss) == Approx(0.25).epsilon(1e-12));
  CHECK(return_probability_bruteforce(ss) == Approx(0.25).epsilon(1e-12));

  // two disjoint pi edges factorize
  EvolvedState pairs(4, GateMode::Iqp);
  pairs.apply_two_qubit_gate(0, 1, kPi);
  pairs.apply_two_qubit_gate(2, 3, kPi);
  CHECK(return_probability_bruteforce(ising_symmetrize(pairs)) == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("return probability against the plain overlap on dense states") {
  Rng rng = make_rng(13, 0);
  for (int trial = 0; trial < 15; ++trial) {
    const uint32_t n = 2 + static_cast<uint32_t>(uniform_below(rng, 7));
    const auto circuit = oracles::random_iqp_circuit(n, 3 * n, 0.3, rng);
    const SymmetrizedState sym = ising_symmetrize(circuit.state);
    DenseState dense = oracles::replay_dense(circuit);
    for (uint32_t q = 0; q < n; ++q) {
      if (sym.z[q] != 0.0) dense.apply_single_phase(q, -sym.z[q]);
    }
    // overlap with |+...+>
    std::complex<double> overlap = 0.0;
    for (uint64_t b = 0; b < (uint64_t{1} << n); ++b) overlap += dense.amplitude(b);
    overlap *= std::pow(2.0, -0.5 * n);
    CHECK(return_probability_bruteforce(sym) == Approx(std::norm(overlap)).epsilon(1e-10));
  }
}

TEST_CASE("tree formula equals brute force on random trees") {
  Rng rng = make_rng(17, 0);
  double max_err = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const uint32_t n = 2 + static_cast<uint32_t>(uniform_below(rng, 11));  // up to 12
    const EvolvedState tree = oracles::random_tree_state(n, rng);
    const SymmetrizedState sym = ising_symmetrize(tree);
    max_err = std::max(max_err,
                       std::abs(return_probability_tree(sym) - return_probability_bruteforce(sym)));
  }
  CHECK(max_err <= 1e-10);
}

TEST_CASE("the tree formula is loop-sensitive") {
  EvolvedState triangle(3, GateMode::Iqp);
  triangle.apply_two_qubit_gate(0, 1, kPi);
  triangle.apply_two_qubit_gate(0, 2, kPi);
  triangle.apply_two_qubit_gate(1, 2, kPi);
  const SymmetrizedState sym = ising_symmetrize(triangle);
  CHECK_THROWS(return_probability_tree(sym));
  CHECK(std::abs(tree_formula_value(triangle) - return_probability_bruteforce(sym)) > 1e-6);
  // exact values: brute force 1/4, blind product 1/8
  CHECK(return_probability_bruteforce(sym) == Approx(0.25).epsilon(1e-12));
  CHECK(tree_formula_value(triangle) == Approx(0.125).epsilon(1e-12));
}

TEST_CASE("log-space return probabilities match the direct products") {
  Rng rng = make_rng(19, 0);
  const EvolvedState tree = oracles::random_tree_state(10, rng);
  const SymmetrizedState sym = ising_symmetrize(tree);
  CHECK(return_probability_bruteforce_log10(sym) ==
        Approx(std::log10(return_probability_bruteforce(sym))).epsilon(1e-10));
  CHECK(tree_formula_log10(tree) ==
        Approx(std::log10(tree_formula_value(tree))).epsilon(1e-10));
}

TEST_CASE("cycle detection per component") {
  EvolvedState triangle(3, GateMode::Iqp);
  triangle.apply_two_qubit_gate(0, 1, 1.0);
  triangle.apply_two_qubit_gate(0, 2, 1.0);
  triangle.apply_two_qubit_gate(1, 2, 1.0);
  CHECK(component_has_cycle(triangle, triangle.connected_components()[0]));

  EvolvedState path(5, GateMode::Iqp);
  for (uint32_t v = 0; v + 1 < 5; ++v) path.apply_two_qubit_gate(v, v + 1, 1.0);
  CHECK_FALSE(component_has_cycle(path, path.connected_components()[0]));

  EvolvedState pairs(4, GateMode::Iqp);
  pairs.apply_two_qubit_gate(0, 1, 1.0);
  pairs.apply_two_qubit_gate(2, 3, 1.0);
  for (const auto& comp : pairs.connected_components()) {
    CHECK_FALSE(component_has_cycle(pairs, comp));
  }
}

TEST_CASE("z-basis single-spin marginals are exactly one half") {
  Rng rng = make_rng(23, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const uint32_t n = 2 + static_cast<uint32_t>(uniform_below(rng, 9));  // up to 10
    const auto circuit = oracles::random_iqp_circuit(n, 4 * n, 0.3, rng);
    const auto vec = iqp_state_vector(circuit.state);
    for (uint32_t q = 0; q < n; ++q) {
      double p1 = 0.0;
      for (uint64_t b = 0; b < vec.size(); ++b) {
        if (b & (uint64_t{1} << q)) p1 += std::norm(vec[b]);
      }
      CHECK(p1 == Approx(0.5).epsilon(1e-12));
    }
  }
}
