#include "sepsim/tableau.hpp"

#include <bit>
#include <stdexcept>

namespace sepsim {

namespace {

uint32_t word_count(uint32_t n) { return (n + 63) / 64; }

void set_bit(std::vector<uint64_t>& bits, uint32_t q, bool v) {
  if (v)
    bits[q / 64] |= uint64_t{1} << (q % 64);
  else
    bits[q / 64] &= ~(uint64_t{1} << (q % 64));
}

}  // namespace

Pauli Pauli::identity(uint32_t n) {
  Pauli p;
  p.n = n;
  p.x.assign(word_count(n), 0);
  p.z.assign(word_count(n), 0);
  return p;
}

Pauli Pauli::single(uint32_t n, uint32_t qubit, PauliAxis axis) {
  if (qubit >= n) throw std::invalid_argument("Pauli: qubit index out of range");
  Pauli p = identity(n);
  if (axis != PauliAxis::Z) p.set_x(qubit, true);
  if (axis != PauliAxis::X) p.set_z(qubit, true);
  return p;
}

Pauli Pauli::from_string(uint32_t n, std::string_view s) {
  Pauli p = identity(n);
  size_t start = 0;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    if (s[0] == '-') p.phase = 2;
    start = 1;
  }
  if (s.size() - start != n) throw std::invalid_argument("Pauli: string length mismatch");
  for (uint32_t q = 0; q < n; ++q) {
    switch (s[start + q]) {
      case 'I': break;
      case 'X': p.set_x(q, true); break;
      case 'Y': p.set_x(q, true); p.set_z(q, true); break;
      case 'Z': p.set_z(q, true); break;
      default: throw std::invalid_argument("Pauli: unknown letter");
    }
  }
  return p;
}

void Pauli::set_x(uint32_t q, bool v) { set_bit(x, q, v); }
void Pauli::set_z(uint32_t q, bool v) { set_bit(z, q, v); }

StabilizerTableau::StabilizerTableau(uint32_t n)
    : n_(n), x_(2 * n, n), z_(2 * n, n), phase_(2 * n, 0) {
  if (n == 0) throw std::invalid_argument("StabilizerTableau: need at least one qubit");
}

StabilizerTableau StabilizerTableau::plus_state(uint32_t n) {
  StabilizerTableau t(n);
  for (uint32_t i = 0; i < n; ++i) {
    t.z_.set(i, i, true);         // destabilizer Z_i
    t.x_.set(n + i, i, true);     // stabilizer X_i
  }
  return t;
}

StabilizerTableau StabilizerTableau::zero_state(uint32_t n) {
  StabilizerTableau t(n);
  for (uint32_t i = 0; i < n; ++i) {
    t.x_.set(i, i, true);         // destabilizer X_i
    t.z_.set(n + i, i, true);     // stabilizer Z_i
  }
  return t;
}

StabilizerTableau StabilizerTableau::from_graph_state(const EvolvedState& state) {
  if (state.mode() != GateMode::Clifford)
    throw std::invalid_argument("from_graph_state: clifford-mode state required");
  const uint32_t n = state.num_qubits();
  StabilizerTableau t(n);
  for (uint32_t m = 0; m < n; ++m) {
    t.z_.set(m, m, true);  // destabilizer Z_m
    t.x_.set(n + m, m, true);
    for (uint32_t nb : state.neighbors(m)) t.z_.set(n + m, nb, true);
    t.phase_[n + m] = state.w(m) == 0.0 ? 0 : 2;
  }
  return t;
}

bool StabilizerTableau::anticommutes_row(uint32_t row, const Pauli& op) const {
  const uint64_t* rx = x_.row(row);
  const uint64_t* rz = z_.row(row);
  uint64_t acc = 0;
  for (uint32_t w = 0; w < words(); ++w) {
    acc ^= (rx[w] & op.z[w]) ^ (rz[w] & op.x[w]);
  }
  return std::popcount(acc) & 1;
}

void StabilizerTableau::multiply_row_by_row(uint32_t dst, uint32_t src) {
  uint64_t* xd = x_.row(dst);
  uint64_t* zd = z_.row(dst);
  const uint64_t* xs = x_.row(src);
  const uint64_t* zs = z_.row(src);
  int plus = 0, minus = 0;
  for (uint32_t w = 0; w < words(); ++w) {
    const uint64_t y1 = xs[w] & zs[w];
    const uint64_t xo = xs[w] & ~zs[w];
    const uint64_t zo = ~xs[w] & zs[w];
    plus += std::popcount(y1 & zd[w] & ~xd[w]) + std::popcount(xo & zd[w] & xd[w]) +
            std::popcount(zo & xd[w] & ~zd[w]);
    minus += std::popcount(y1 & xd[w] & ~zd[w]) + std::popcount(xo & zd[w] & ~xd[w]) +
             std::popcount(zo & xd[w] & zd[w]);
    xd[w] ^= xs[w];
    zd[w] ^= zs[w];
  }
  phase_[dst] =
      static_cast<uint8_t>(((phase_[dst] + phase_[src] + plus - minus) % 4 + 4) % 4);
}

void StabilizerTableau::multiply_pauli_by_row(Pauli& dst, uint32_t src) const {
  const uint64_t* xs = x_.row(src);
  const uint64_t* zs = z_.row(src);
  int plus = 0, minus = 0;
  for (uint32_t w = 0; w < words(); ++w) {
    const uint64_t y1 = xs[w] & zs[w];
    const uint64_t xo = xs[w] & ~zs[w];
    const uint64_t zo = ~xs[w] & zs[w];
    plus += std::popcount(y1 & dst.z[w] & ~dst.x[w]) + std::popcount(xo & dst.z[w] & dst.x[w]) +
            std::popcount(zo & dst.x[w] & ~dst.z[w]);
    minus += std::popcount(y1 & dst.x[w] & ~dst.z[w]) + std::popcount(xo & dst.z[w] & ~dst.x[w]) +
             std::popcount(zo & dst.x[w] & dst.z[w]);
    dst.x[w] ^= xs[w];
    dst.z[w] ^= zs[w];
  }
  dst.phase = static_cast<uint8_t>(((dst.phase + phase_[src] + plus - minus) % 4 + 4) % 4);
}

template <class AntiPred, class WriteOp>
int StabilizerTableau::measure_impl(const AntiPred& anti, const WriteOp& write, uint8_t op_phase,
                                    Rng* rng, bool force_plus) {
  int p = -1;
  for (uint32_t r = n_; r < 2 * n_; ++r) {
    if (anti(r)) {
      p = static_cast<int>(r);
      break;
    }
  }
  if (p >= 0) {
    const uint32_t up = static_cast<uint32_t>(p);
    for (uint32_t r = 0; r < 2 * n_; ++r) {
      if (r == up || r == up - n_) continue;
      if (anti(r)) multiply_row_by_row(r, up);
    }
    // The replaced generator becomes the measured operator's destabilizer.
    for (uint32_t w = 0; w < words(); ++w) {
      x_.row(up - n_)[w] = x_.row(up)[w];
      z_.row(up - n_)[w] = z_.row(up)[w];
    }
    phase_[up - n_] = phase_[up];
    const int s = force_plus ? 0 : (coin(*rng) ? 1 : 0);
    write(up);
    phase_[up] = static_cast<uint8_t>((op_phase + 2 * s) % 4);
    return s == 0 ? 1 : -1;
  }

  // Deterministic outcome: express the operator as a product of stabilizers,
  // selected by which destabilizers anticommute with it.
  Pauli scratch = Pauli::identity(n_);
  for (uint32_t i = 0; i < n_; ++i) {
    if (anti(i)) multiply_pauli_by_row(scratch, n_ + i);
  }
  const int diff = ((op_phase - scratch.phase) % 4 + 4) % 4;
  if (diff != 0 && diff != 2)
    throw std::logic_error("measure: operator not in the stabilizer group up to sign");
  return diff == 0 ? 1 : -1;
}

int StabilizerTableau::measure_pauli(uint32_t qubit, PauliAxis axis, Rng& rng) {
  if (qubit >= n_) throw std::invalid_argument("measure: qubit index out of range");
  auto anti = [&](uint32_t r) {
    switch (axis) {
      case PauliAxis::X: return z_.get(r, qubit);
      case PauliAxis::Z: return x_.get(r, qubit);
      default: return x_.get(r, qubit) != z_.get(r, qubit);
    }
  };
  auto write = [&](uint32_t p) {
    x_.clear_row(p);
    z_.clear_row(p);
    if (axis != PauliAxis::Z) x_.set(p, qubit, true);
    if (axis != PauliAxis::X) z_.set(p, qubit, true);
  };
  return measure_impl(anti, write, 0, &rng, false);
}

int StabilizerTableau::measure_pauli(const Pauli& op, Rng& rng) {
  if (op.n != n_) throw std::invalid_argument("measure: operator size mismatch");
  if (op.phase != 0 && op.phase != 2)
    throw std::invalid_argument("measure: operator must be Hermitian");
  auto anti = [&](uint32_t r) { return anticommutes_row(r, op); };
  auto write = [&](uint32_t p) {
    for (uint32_t w = 0; w < words(); ++w) {
      x_.row(p)[w] = op.x[w];
      z_.row(p)[w] = op.z[w];
    }
  };
  return measure_impl(anti, write, op.phase, &rng, false);
}

void StabilizerTableau::postselect(const Pauli& op) {
  if (op.n != n_) throw std::invalid_argument("postselect: operator size mismatch");
  if (op.phase != 0 && op.phase != 2)
    throw std::invalid_argument("postselect: operator must be Hermitian");
  auto anti = [&](uint32_t r) { return anticommutes_row(r, op); };
  auto write = [&](uint32_t p) {
    for (uint32_t w = 0; w < words(); ++w) {
      x_.row(p)[w] = op.x[w];
      z_.row(p)[w] = op.z[w];
    }
  };
  if (measure_impl(anti, write, op.phase, nullptr, true) != 1)
    throw std::runtime_error("postselect: state lies in the -1 eigenspace");
}

uint32_t StabilizerTableau::subsystem_entropy(std::span<const uint32_t> a) const {
  for (uint32_t q : a) {
    if (q >= n_) throw std::invalid_argument("subsystem_entropy: qubit index out of range");
  }
  if (a.empty() || a.size() == n_) return 0;
  BitMatrix restricted(n_, 2 * a.size());
  for (uint32_t i = 0; i < n_; ++i) {
    for (size_t t = 0; t < a.size(); ++t) {
      restricted.set(i, 2 * t, x_.get(n_ + i, a[t]));
      restricted.set(i, 2 * t + 1, z_.get(n_ + i, a[t]));
    }
  }
  const size_t rank = gf2_rank(std::move(restricted));
  if (rank < a.size()) throw std::logic_error("subsystem_entropy: rank below subset size");
  return static_cast<uint32_t>(rank - a.size());
}

uint32_t StabilizerTableau::mutual_information(std::span<const uint32_t> a,
                                               std::span<const uint32_t> b) const {
  std::vector<uint8_t> seen(n_, 0);
  std::vector<uint32_t> joint;
  joint.reserve(a.size() + b.size());
  for (uint32_t q : a) {
    if (q >= n_) throw std::invalid_argument("mutual_information: index out of range");
    seen[q] = 1;
    joint.push_back(q);
  }
  for (uint32_t q : b) {
    if (q >= n_) throw std::invalid_argument("mutual_information: index out of range");
    if (seen[q]) throw std::invalid_argument("mutual_information: subsets overlap");
    joint.push_back(q);
  }
  return subsystem_entropy(a) + subsystem_entropy(b) - subsystem_entropy(joint);
}

Pauli StabilizerTableau::stabilizer(uint32_t i) const {
  if (i >= n_) throw std::invalid_argument("stabilizer index out of range");
  Pauli p = Pauli::identity(n_);
  for (uint32_t w = 0; w < words(); ++w) {
    p.x[w] = x_.row(n_ + i)[w];
    p.z[w] = z_.row(n_ + i)[w];
  }
  p.phase = phase_[n_ + i];
  return p;
}

Pauli StabilizerTableau::destabilizer(uint32_t i) const {
  if (i >= n_) throw std::invalid_argument("destabilizer index out of range");
  Pauli p = Pauli::identity(n_);
  for (uint32_t w = 0; w < words(); ++w) {
    p.x[w] = x_.row(i)[w];
    p.z[w] = z_.row(i)[w];
  }
  p.phase = phase_[i];
  return p;
}

void StabilizerTableau::check_valid() const {
  auto symplectic = [&](uint32_t r1, uint32_t r2) {
    uint64_t acc = 0;
    for (uint32_t w = 0; w < words(); ++w) {
      acc ^= (x_.row(r1)[w] & z_.row(r2)[w]) ^ (z_.row(r1)[w] & x_.row(r2)[w]);
    }
    return static_cast<int>(std::popcount(acc) & 1);
  };
  for (uint32_t i = 0; i < n_; ++i) {
    if (phase_[n_ + i] != 0 && phase_[n_ + i] != 2)
      throw std::logic_error("tableau: stabilizer phase not +-1");
    for (uint32_t j = i + 1; j < n_; ++j) {
      if (symplectic(n_ + i, n_ + j)) throw std::logic_error("tableau: stabilizers anticommute");
    }
    for (uint32_t j = 0; j < n_; ++j) {
      const int want = i == j ? 1 : 0;
      if (symplectic(j, n_ + i) != want)
        throw std::logic_error("tableau: destabilizer pairing violated");
    }
  }
  BitMatrix full(n_, 2 * n_);
  for (uint32_t i = 0; i < n_; ++i) {
    for (uint32_t q = 0; q < n_; ++q) {
      full.set(i, q, x_.get(n_ + i, q));
      full.set(i, n_ + q, z_.get(n_ + i, q));
    }
  }
  if (gf2_rank(std::move(full)) != n_) throw std::logic_error("tableau: stabilizers dependent");
}

EntanglingPowerResult entangling_power_experiment(const EvolvedState& state, uint32_t a,
                                                  uint32_t b, MeasureBasisMode basis, Rng& rng) {
  if (state.mode() != GateMode::Clifford)
    throw std::invalid_argument("entangling power: clifford-mode state required");
  const uint32_t n = state.num_qubits();
  if (a >= n || b >= n || a == b)
    throw std::invalid_argument("entangling power: need two distinct qubits");

  StabilizerTableau tableau = StabilizerTableau::from_graph_state(state);
  const uint32_t qa[1] = {a}, qb[1] = {b};
  EntanglingPowerResult result;
  result.i_before = tableau.mutual_information(qa, qb);
  for (uint32_t q = 0; q < n; ++q) {
    if (q == a || q == b) continue;
    PauliAxis axis = PauliAxis::X;
    if (basis == MeasureBasisMode::RandomPerQubit) {
      axis = static_cast<PauliAxis>(uniform_below(rng, 3));
    }
    tableau.measure_pauli(q, axis, rng);
  }
  result.i_after = tableau.mutual_information(qa, qb);
  result.delta = static_cast<int>(result.i_after) - static_cast<int>(result.i_before);
  return result;
}

}  // namespace sepsim
