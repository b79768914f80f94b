#include "sepsim/iqp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sepsim {

namespace {
constexpr uint32_t kMaxVectorQubits = 24;
constexpr uint32_t kMaxComplementQubits = 14;
constexpr uint32_t kMaxComponentQubits = 24;
}  // namespace

std::complex<double> iqp_amplitude(const EvolvedState& state, std::span<const uint8_t> bits) {
  const uint32_t n = state.num_qubits();
  if (bits.size() != n) throw std::invalid_argument("iqp_amplitude: bitstring length mismatch");
  double phase = 0.0;
  for (uint32_t i = 0; i < n; ++i) {
    if (!bits[i]) continue;
    phase += state.w(i);
    for (uint32_t j : state.neighbors(i)) {
      if (j > i && bits[j]) phase += state.theta(i, j);
    }
  }
  return std::polar(std::pow(2.0, -0.5 * n), phase);
}

std::vector<std::complex<double>> iqp_state_vector(const EvolvedState& state) {
  const uint32_t n = state.num_qubits();
  if (n > kMaxVectorQubits)
    throw std::invalid_argument("iqp_state_vector: state too large for a full vector");
  const uint64_t dim = uint64_t{1} << n;
  const double mag = std::pow(2.0, -0.5 * n);

  std::vector<std::complex<double>> out(dim);
  std::vector<uint8_t> bits(n, 0);
  // Gray-code walk: each step flips one bit and adjusts the phase by the
  // flipped spin's couplings to the currently set bits.
  double phase = 0.0;
  out[0] = std::polar(mag, 0.0);
  for (uint64_t g = 1; g < dim; ++g) {
    const uint32_t p = static_cast<uint32_t>(std::countr_zero(g));
    double delta = state.w(p);
    for (uint32_t j : state.neighbors(p)) {
      if (bits[j]) delta += state.theta(p, j);
    }
    if (bits[p]) {
      bits[p] = 0;
      phase -= delta;
    } else {
      bits[p] = 1;
      phase += delta;
    }
    uint64_t idx = 0;
    for (uint32_t q = 0; q < n; ++q)
      if (bits[q]) idx |= uint64_t{1} << q;
    out[idx] = std::polar(mag, phase);
  }
  return out;
}

double iqp_purity(const EvolvedState& state, const Bipartition& cut) {
  const uint32_t n = state.num_qubits();
  if (cut.num_qubits() != n) throw std::invalid_argument("iqp_purity: bipartition size mismatch");
  const auto& a = cut.subset_a();
  std::vector<uint8_t> in_a(n, 0);
  for (uint32_t q : a) in_a[q] = 1;
  std::vector<uint32_t> comp;
  for (uint32_t q = 0; q < n; ++q)
    if (!in_a[q]) comp.push_back(q);
  if (comp.size() > kMaxComplementQubits)
    throw std::invalid_argument("iqp_purity: complement larger than 14 qubits");
  if (a.empty() || comp.empty()) return 1.0;

  // Columns of the cross block with no coupling into A contribute an exact
  // factor 4 each; only coupled columns are enumerated.
  std::vector<uint32_t> active;
  double idle_factor = 1.0;
  for (uint32_t j : comp) {
    bool coupled = false;
    for (uint32_t nb : state.neighbors(j)) {
      if (in_a[nb]) {
        coupled = true;
        break;
      }
    }
    if (coupled)
      active.push_back(j);
    else
      idle_factor *= 4.0;
  }

  // Group the double sum over (r, r') by d = r - r' in {-1,0,1}^active;
  // d_j = 0 arises from two (r_j, r'_j) pairs, d_j = +-1 from one each.
  std::vector<double> partial(a.size(), 0.0);
  double total = 0.0;
  auto leaf = [&](double weight) {
    double prod = weight;
    for (double v : partial) prod *= 1.0 + std::cos(v);
    total += prod;
  };
  auto recurse = [&](auto&& self, size_t depth, double weight) -> void {
    if (depth == active.size()) {
      leaf(weight);
      return;
    }
    const uint32_t j = active[depth];
    self(self, depth + 1, 2.0 * weight);  // d_j = 0
    for (const double sign : {1.0, -1.0}) {
      for (size_t t = 0; t < a.size(); ++t) partial[t] += sign * state.theta(a[t], j);
      self(self, depth + 1, weight);
      for (size_t t = 0; t < a.size(); ++t) partial[t] -= sign * state.theta(a[t], j);
    }
  };
  recurse(recurse, 0, 1.0);

  // Tr rho_A^2 = D_A / D^2 * (sum) with the idle columns restored.
  const double scale =
      std::pow(2.0, static_cast<double>(a.size()) - 2.0 * static_cast<double>(n));
  return scale * idle_factor * total;
}

SymmetrizedState ising_symmetrize(const EvolvedState& state) {
  const uint32_t n = state.num_qubits();
  SymmetrizedState sym{state, std::vector<double>(n, 0.0)};
  for (uint32_t m = 0; m < n; ++m) {
    double row_sum = 0.0;
    for (uint32_t j : state.neighbors(m)) row_sum += state.theta(m, j);
    sym.z[m] = reduce_angle(state.w(m) + 0.5 * row_sum);
  }
  return sym;
}

namespace {

/// |2^{-m} sum_{sigma in {+-1}^m} exp[(i/4) sum_{n<m} theta sigma sigma]|^2
/// for one connected component, by a Gray-code walk over sign flips.
double component_return_probability(const EvolvedState& state,
                                    std::span<const uint32_t> comp) {
  const size_t m = comp.size();
  if (m == 1) return 1.0;
  if (m > kMaxComponentQubits)
    throw std::invalid_argument("return_probability_bruteforce: component larger than 24 nodes");

  std::vector<std::vector<std::pair<uint32_t, double>>> adj(m);
  for (size_t t = 0; t < m; ++t) {
    for (uint32_t nb : state.neighbors(comp[t])) {
      for (size_t u = 0; u < m; ++u) {
        if (comp[u] == nb) {
          adj[t].emplace_back(static_cast<uint32_t>(u), state.theta(comp[t], nb));
          break;
        }
      }
    }
  }

  std::vector<int8_t> sigma(m, 1);
  double phase = 0.0;  // (1/4) sum_{n<m} theta sigma sigma, start all +1
  for (size_t t = 0; t < m; ++t) {
    for (const auto& [u, th] : adj[t]) {
      if (u > t) phase += 0.25 * th;
    }
  }
  std::complex<double> acc = std::polar(1.0, phase);
  const uint64_t dim = uint64_t{1} << m;
  for (uint64_t g = 1; g < dim; ++g) {
    const uint32_t p = static_cast<uint32_t>(std::countr_zero(g));
    double coupling = 0.0;
    for (const auto& [u, th] : adj[p]) coupling += th * sigma[u];
    // Flipping sigma_p changes S = sum theta sigma sigma by -2 sigma_p * coupling.
    phase -= 0.5 * sigma[p] * coupling;
    sigma[p] = -sigma[p];
    acc += std::polar(1.0, phase);
  }
  const double mag = std::abs(acc) / static_cast<double>(dim);
  return mag * mag;
}

}  // namespace

double return_probability_bruteforce(const SymmetrizedState& sym) {
  double p = 1.0;
  for (const auto& comp : sym.state.connected_components()) {
    p *= component_return_probability(sym.state, comp);
  }
  return p;
}

double return_probability_component(const SymmetrizedState& sym,
                                    std::span<const uint32_t> component) {
  return component_return_probability(sym.state, component);
}

double return_probability_bruteforce_log10(const SymmetrizedState& sym) {
  double acc = 0.0;
  for (const auto& comp : sym.state.connected_components()) {
    acc += std::log10(component_return_probability(sym.state, comp));
  }
  return acc;
}

double tree_formula_log10(const EvolvedState& state) {
  double acc = 0.0;
  state.for_each_edge([&](uint32_t i, uint32_t j) {
    const double c = std::cos(state.theta(i, j) / 4.0);
    acc += std::log10(c * c);
  });
  return acc;
}

double tree_formula_value(const EvolvedState& state) {
  double p = 1.0;
  state.for_each_edge([&](uint32_t i, uint32_t j) {
    const double c = std::cos(state.theta(i, j) / 4.0);
    p *= c * c;
  });
  return p;
}

double return_probability_tree(const SymmetrizedState& sym) {
  for (const auto& comp : sym.state.connected_components()) {
    if (component_has_cycle(sym.state, comp))
      throw std::invalid_argument(
          "return_probability_tree: component carries a cycle; use the brute-force sum");
  }
  return tree_formula_value(sym.state);
}

bool component_has_cycle(const EvolvedState& state, std::span<const uint32_t> component) {
  uint64_t degree_sum = 0;
  for (uint32_t v : component) degree_sum += state.degree(v);
  return degree_sum / 2 >= component.size();
}

}  // namespace sepsim
