#include "sepsim/gf2.hpp"

#include <bit>

namespace sepsim {

size_t BitMatrix::row_popcount(size_t r) const {
  const uint64_t* p = row(r);
  size_t n = 0;
  for (size_t w = 0; w < words_; ++w) n += std::popcount(p[w]);
  return n;
}

size_t gf2_rank(BitMatrix m) {
  const size_t rows = m.rows();
  const size_t cols = m.cols();
  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < rows; ++c) {
    size_t pivot = rank;
    while (pivot < rows && !m.get(pivot, c)) ++pivot;
    if (pivot == rows) continue;
    m.swap_rows(rank, pivot);
    for (size_t r = pivot + 1; r < rows; ++r) {
      if (m.get(r, c)) m.xor_row(r, rank);
    }
    ++rank;
  }
  return rank;
}

}  // namespace sepsim
