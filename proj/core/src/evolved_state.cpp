#include "sepsim/evolved_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sepsim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double reduce_angle(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0) y += kTwoPi;
  if (y < EvolvedState::kAngleSnapTol || kTwoPi - y < EvolvedState::kAngleSnapTol) return 0.0;
  return y;
}

Bipartition::Bipartition(std::vector<uint32_t> subset_a, uint32_t n)
    : a_(std::move(subset_a)), n_(n) {
  std::sort(a_.begin(), a_.end());
  if (std::adjacent_find(a_.begin(), a_.end()) != a_.end())
    throw std::invalid_argument("Bipartition: duplicate qubit index");
  if (!a_.empty() && a_.back() >= n)
    throw std::invalid_argument("Bipartition: qubit index out of range");
}

EvolvedState::EvolvedState(uint32_t n, GateMode mode) : n_(n), mode_(mode), degree_(n, 0) {
  if (n == 0) throw std::invalid_argument("EvolvedState: need at least one qubit");
  if (bitform()) {
    adj_ = BitMatrix(n, n);
    wbit_.assign(n, 0);
  } else {
    theta_map_.resize(n);
    w_.assign(n, 0.0);
  }
}

void EvolvedState::validate_pair(uint32_t i, uint32_t j) const {
  if (i >= n_ || j >= n_) throw std::invalid_argument("qubit index out of range");
  if (i == j) throw std::invalid_argument("two-qubit gate needs distinct qubits");
}

void EvolvedState::apply_two_qubit_gate(uint32_t i, uint32_t j, double angle) {
  validate_pair(i, j);
  if (mode_ == GateMode::Clifford) {
    if (std::abs(angle - kPi) > kAngleSnapTol)
      throw std::invalid_argument("clifford mode admits only angle pi (CZ)");
    const bool present = adj_.get(i, j);
    adj_.toggle(i, j);
    adj_.toggle(j, i);
    if (present) {
      --degree_[i];
      --degree_[j];
      --num_edges_;
    } else {
      ++degree_[i];
      ++degree_[j];
      ++num_edges_;
    }
  } else if (mode_ == GateMode::IdealizedGraph) {
    if (reduce_angle(angle) == 0.0) return;
    if (!adj_.get(i, j)) {
      adj_.set(i, j, true);
      adj_.set(j, i, true);
      ++degree_[i];
      ++degree_[j];
      ++num_edges_;
    }
  } else {
    auto it = theta_map_[i].find(j);
    const double old = it == theta_map_[i].end() ? 0.0 : it->second;
    const double next = reduce_angle(old + angle);
    if (next == 0.0) {
      if (it != theta_map_[i].end()) {
        theta_map_[i].erase(it);
        theta_map_[j].erase(i);
        --degree_[i];
        --degree_[j];
        --num_edges_;
      }
    } else {
      if (it == theta_map_[i].end()) {
        ++degree_[i];
        ++degree_[j];
        ++num_edges_;
      }
      theta_map_[i][j] = next;
      theta_map_[j][i] = next;
    }
  }
}

void EvolvedState::apply_cz(uint32_t i, uint32_t j) { apply_two_qubit_gate(i, j, kPi); }

int EvolvedState::measure_z_and_reset(uint32_t k, Rng& rng) {
  if (k >= n_) throw std::invalid_argument("qubit index out of range");
  // Z-basis outcomes of any state of this form are an exact fair coin.
  const int outcome = coin(rng) ? 1 : 0;
  if (bitform()) {
    const uint64_t* row = adj_.row(k);
    for (uint32_t wi = 0; wi * 64 < n_; ++wi) {
      uint64_t word = row[wi];
      while (word) {
        const uint32_t m = wi * 64 + std::countr_zero(word);
        word &= word - 1;
        if (outcome) wbit_[m] ^= 1;
        adj_.set(m, k, false);
        --degree_[m];
        --num_edges_;
      }
    }
    adj_.clear_row(k);
    degree_[k] = 0;
    wbit_[k] = 0;
  } else {
    for (const auto& [m, angle] : theta_map_[k]) {
      if (outcome) w_[m] = reduce_angle(w_[m] + angle);
      theta_map_[m].erase(k);
      --degree_[m];
      --num_edges_;
    }
    theta_map_[k].clear();
    degree_[k] = 0;
    w_[k] = 0.0;
  }
  return outcome;
}

double EvolvedState::theta(uint32_t i, uint32_t j) const {
  if (i >= n_ || j >= n_) throw std::invalid_argument("qubit index out of range");
  if (i == j) return 0.0;
  if (bitform()) return adj_.get(i, j) ? kPi : 0.0;
  auto it = theta_map_[i].find(j);
  return it == theta_map_[i].end() ? 0.0 : it->second;
}

double EvolvedState::w(uint32_t i) const {
  if (i >= n_) throw std::invalid_argument("qubit index out of range");
  return bitform() ? (wbit_[i] ? kPi : 0.0) : w_[i];
}

bool EvolvedState::has_edge(uint32_t i, uint32_t j) const {
  if (i >= n_ || j >= n_) throw std::invalid_argument("qubit index out of range");
  if (i == j) return false;
  if (bitform()) return adj_.get(i, j);
  return theta_map_[i].count(j) != 0;
}

std::vector<uint32_t> EvolvedState::neighbors(uint32_t i) const {
  if (i >= n_) throw std::invalid_argument("qubit index out of range");
  std::vector<uint32_t> out;
  out.reserve(degree_[i]);
  if (bitform()) {
    const uint64_t* row = adj_.row(i);
    for (uint32_t wi = 0; wi * 64 < n_; ++wi) {
      uint64_t word = row[wi];
      while (word) {
        out.push_back(wi * 64 + std::countr_zero(word));
        word &= word - 1;
      }
    }
  } else {
    for (const auto& [j, angle] : theta_map_[i]) out.push_back(j);
    std::sort(out.begin(), out.end());
  }
  return out;
}

uint32_t EvolvedState::bipartite_entropy_clifford(const Bipartition& cut) const {
  if (mode_ != GateMode::Clifford)
    throw std::invalid_argument("bipartite entropy via GF(2) rank needs clifford mode");
  if (cut.num_qubits() != n_) throw std::invalid_argument("bipartition size mismatch");
  const auto& a = cut.subset_a();
  if (a.empty() || a.size() == n_) return 0;

  // Rows of A, columns masked to the complement.
  const size_t words = adj_.words_per_row();
  std::vector<uint64_t> mask(words, ~uint64_t{0});
  if (n_ % 64) mask[words - 1] = (uint64_t{1} << (n_ % 64)) - 1;
  for (uint32_t q : a) mask[q / 64] &= ~(uint64_t{1} << (q % 64));

  BitMatrix block(a.size(), n_);
  for (size_t r = 0; r < a.size(); ++r) {
    const uint64_t* src = adj_.row(a[r]);
    uint64_t* dst = block.row(r);
    for (size_t w = 0; w < words; ++w) dst[w] = src[w] & mask[w];
  }
  return static_cast<uint32_t>(gf2_rank(std::move(block)));
}

bool EvolvedState::is_separable(const Bipartition& cut) const {
  if (cut.num_qubits() != n_) throw std::invalid_argument("bipartition size mismatch");
  const auto& a = cut.subset_a();
  if (a.empty() || a.size() == n_) return true;
  std::vector<uint8_t> in_a(n_, 0);
  for (uint32_t q : a) in_a[q] = 1;
  for (uint32_t q : a) {
    if (bitform()) {
      const uint64_t* row = adj_.row(q);
      for (uint32_t wi = 0; wi * 64 < n_; ++wi) {
        uint64_t word = row[wi];
        while (word) {
          const uint32_t j = wi * 64 + std::countr_zero(word);
          word &= word - 1;
          if (!in_a[j]) return false;
        }
      }
    } else {
      for (const auto& [j, angle] : theta_map_[q]) {
        if (!in_a[j]) return false;
      }
    }
  }
  return true;
}

std::vector<std::vector<uint32_t>> EvolvedState::connected_components() const {
  std::vector<std::vector<uint32_t>> comps;
  std::vector<uint8_t> seen(n_, 0);
  std::vector<uint32_t> stack;
  for (uint32_t start = 0; start < n_; ++start) {
    if (seen[start]) continue;
    std::vector<uint32_t> comp;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const uint32_t v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (uint32_t u : neighbors(v)) {
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

void EvolvedState::check_invariants() const {
  uint64_t edges = 0;
  for (uint32_t i = 0; i < n_; ++i) {
    uint32_t deg = 0;
    for (uint32_t j = 0; j < n_; ++j) {
      const double t = theta(i, j);
      if (t != theta(j, i)) throw std::logic_error("theta not symmetric");
      if (i == j && t != 0.0) throw std::logic_error("theta diagonal not zero");
      if (t < 0.0 || t >= kTwoPi) throw std::logic_error("theta outside [0, 2pi)");
      if (mode_ == GateMode::Clifford && t != 0.0 && t != kPi)
        throw std::logic_error("clifford theta entry not in {0, pi}");
      if (t != 0.0) {
        ++deg;
        if (i < j) ++edges;
      }
    }
    if (deg != degree_[i]) throw std::logic_error("degree cache out of sync");
    const double wi = w(i);
    if (wi < 0.0 || wi >= kTwoPi) throw std::logic_error("w outside [0, 2pi)");
    if (mode_ == GateMode::Clifford && wi != 0.0 && wi != kPi)
      throw std::logic_error("clifford w entry not in {0, pi}");
  }
  if (edges != num_edges_) throw std::logic_error("edge count out of sync");
}

}  // namespace sepsim
