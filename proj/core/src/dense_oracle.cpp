#include "sepsim/dense_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sepsim {

namespace {
constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

void check_qubit(uint32_t q, uint32_t n) {
  if (q >= n) throw std::invalid_argument("DenseState: qubit index out of range");
}
}  // namespace

DenseState::DenseState(uint32_t n) : n_(n) {
  if (n == 0 || n > kMaxQubits) throw std::invalid_argument("DenseState: unsupported qubit count");
  const uint64_t dim = uint64_t{1} << n;
  amp_.assign(dim, std::complex<double>(std::pow(2.0, -0.5 * n), 0.0));
}

double DenseState::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

void DenseState::apply_two_qubit_phase(uint32_t i, uint32_t j, double angle) {
  check_qubit(i, n_);
  check_qubit(j, n_);
  if (i == j) throw std::invalid_argument("DenseState: distinct qubits required");
  const std::complex<double> phase = std::polar(1.0, angle);
  const uint64_t mi = uint64_t{1} << i, mj = uint64_t{1} << j;
  for (uint64_t b = 0; b < amp_.size(); ++b) {
    if ((b & mi) && (b & mj)) amp_[b] *= phase;
  }
}

void DenseState::apply_single_phase(uint32_t i, double angle) {
  check_qubit(i, n_);
  const std::complex<double> phase = std::polar(1.0, angle);
  const uint64_t mi = uint64_t{1} << i;
  for (uint64_t b = 0; b < amp_.size(); ++b) {
    if (b & mi) amp_[b] *= phase;
  }
}

void DenseState::apply_cz(uint32_t i, uint32_t j) {
  apply_two_qubit_phase(i, j, std::numbers::pi);
}

void DenseState::apply_hadamard(uint32_t i) {
  check_qubit(i, n_);
  const uint64_t mi = uint64_t{1} << i;
  for (uint64_t b = 0; b < amp_.size(); ++b) {
    if (b & mi) continue;
    const auto a0 = amp_[b];
    const auto a1 = amp_[b | mi];
    amp_[b] = kInvSqrt2 * (a0 + a1);
    amp_[b | mi] = kInvSqrt2 * (a0 - a1);
  }
}

void DenseState::apply_s(uint32_t i) { apply_single_phase(i, std::numbers::pi / 2.0); }
void DenseState::apply_sdg(uint32_t i) { apply_single_phase(i, -std::numbers::pi / 2.0); }

int DenseState::measure_z(uint32_t k, Rng& rng) {
  check_qubit(k, n_);
  const uint64_t mk = uint64_t{1} << k;
  double p1 = 0.0;
  for (uint64_t b = 0; b < amp_.size(); ++b) {
    if (b & mk) p1 += std::norm(amp_[b]);
  }
  const int outcome = uniform_unit(rng) <= p1 ? 1 : 0;
  project_z(k, outcome);
  return outcome;
}

void DenseState::project_z(uint32_t k, int outcome) {
  check_qubit(k, n_);
  const uint64_t mk = uint64_t{1} << k;
  double kept = 0.0;
  for (uint64_t b = 0; b < amp_.size(); ++b) {
    const bool one = (b & mk) != 0;
    if (one != (outcome == 1)) {
      amp_[b] = 0.0;
    } else {
      kept += std::norm(amp_[b]);
    }
  }
  if (kept < 1e-14) throw std::runtime_error("DenseState: projection onto zero-weight branch");
  const double scale = 1.0 / std::sqrt(kept);
  for (auto& a : amp_) a *= scale;
}

void DenseState::rotate_reset(uint32_t k, int outcome) {
  check_qubit(k, n_);
  // exp[i pi/4 (2s-1) Y] = (I +- iY)/sqrt(2)
  const double sgn = outcome == 1 ? 1.0 : -1.0;
  const uint64_t mk = uint64_t{1} << k;
  for (uint64_t b = 0; b < amp_.size(); ++b) {
    if (b & mk) continue;
    const auto a0 = amp_[b];
    const auto a1 = amp_[b | mk];
    amp_[b] = kInvSqrt2 * (a0 + sgn * a1);
    amp_[b | mk] = kInvSqrt2 * (a1 - sgn * a0);
  }
}

std::vector<std::complex<double>> DenseState::reduced_density_matrix(
    std::span<const uint32_t> a) const {
  for (uint32_t q : a) check_qubit(q, n_);
  std::vector<uint32_t> rest;
  for (uint32_t q = 0; q < n_; ++q) {
    bool in_a = false;
    for (uint32_t p : a)
      if (p == q) in_a = true;
    if (!in_a) rest.push_back(q);
  }
  const uint64_t da = uint64_t{1} << a.size();
  const uint64_t dr = uint64_t{1} << rest.size();

  auto scatter = [](uint64_t packed, std::span<const uint32_t> positions) {
    uint64_t out = 0;
    for (size_t b = 0; b < positions.size(); ++b) {
      if (packed & (uint64_t{1} << b)) out |= uint64_t{1} << positions[b];
    }
    return out;
  };
  std::vector<uint64_t> amask(da), rmask(dr);
  for (uint64_t x = 0; x < da; ++x) amask[x] = scatter(x, a);
  for (uint64_t r = 0; r < dr; ++r) rmask[r] = scatter(r, rest);

  std::vector<std::complex<double>> rho(da * da, 0.0);
  for (uint64_t r = 0; r < dr; ++r) {
    for (uint64_t x = 0; x < da; ++x) {
      const auto ax = amp_[amask[x] | rmask[r]];
      if (ax == std::complex<double>(0.0, 0.0)) continue;
      for (uint64_t y = 0; y < da; ++y) {
        rho[x * da + y] += ax * std::conj(amp_[amask[y] | rmask[r]]);
      }
    }
  }
  return rho;
}

double DenseState::subsystem_entropy_bits(std::span<const uint32_t> a) const {
  if (a.size() > kMaxEntropyQubits)
    throw std::invalid_argument("DenseState: entropy subset too large");
  const auto rho = reduced_density_matrix(a);
  const uint64_t da = uint64_t{1} << a.size();
  Eigen::MatrixXcd m(da, da);
  for (uint64_t r = 0; r < da; ++r)
    for (uint64_t c = 0; c < da; ++c) m(r, c) = rho[r * da + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  double bits = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()[i];
    if (lambda > 1e-12) bits -= lambda * std::log2(lambda);
  }
  return bits;
}

double DenseState::subsystem_purity(std::span<const uint32_t> a) const {
  const auto rho = reduced_density_matrix(a);
  double p = 0.0;
  for (const auto& e : rho) p += std::norm(e);
  return p;
}

double DenseState::expectation_all_x() const {
  // <psi| X^{otimes n} |psi> = sum_b conj(psi[~b]) psi[b]
  const uint64_t mask = (uint64_t{1} << n_) - 1;
  std::complex<double> acc = 0.0;
  for (uint64_t b = 0; b < amp_.size(); ++b) {
    acc += std::conj(amp_[b ^ mask]) * amp_[b];
  }
  return acc.real();
}

DenseState simulate_dense(uint32_t n, std::span<const SimOp> ops, Rng& rng) {
  DenseState state(n);
  for (const auto& op : ops) {
    switch (op.kind) {
      case SimOp::Kind::TwoQubitPhase:
        state.apply_two_qubit_phase(op.i, op.j, op.angle);
        break;
      case SimOp::Kind::MeasureReset: {
        const int outcome = op.outcome >= 0 ? op.outcome : state.measure_z(op.i, rng);
        if (op.outcome >= 0) state.project_z(op.i, op.outcome);
        state.rotate_reset(op.i, outcome);
        break;
      }
    }
  }
  return state;
}

}  // namespace sepsim
