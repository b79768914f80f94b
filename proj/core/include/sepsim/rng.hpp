#pragma once

#include <cstdint>
#include <random>

namespace sepsim {

using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-stream generator: stream i of a master seed is
/// independent of how many other streams exist or which thread draws it.
inline Rng make_rng(uint64_t master_seed, uint64_t stream) {
  return Rng(splitmix64(splitmix64(master_seed) ^ splitmix64(stream + 0x51ed2701ULL)));
}

/// Derives an independent child seed, e.g. one per experiment grid point.
inline uint64_t derive_seed(uint64_t base, uint64_t salt) {
  return splitmix64(splitmix64(base) ^ splitmix64(salt ^ 0x6c8e944d1f5aa3b7ULL));
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

/// Uniform integer in [0, n), unbiased via rejection.
inline uint64_t uniform_below(Rng& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

/// Uniform double in (0, 1]; never returns exactly 0.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace sepsim
