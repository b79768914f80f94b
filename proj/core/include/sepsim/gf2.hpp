#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sepsim {

/// Dense bit matrix over GF(2), rows packed into 64-bit words.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), words_(cols == 0 ? 1 : (cols + 63) / 64),
        bits_(rows * words_, 0) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t words_per_row() const { return words_; }

  bool get(size_t r, size_t c) const {
    return (bits_[r * words_ + c / 64] >> (c % 64)) & 1;
  }
  void set(size_t r, size_t c, bool v) {
    uint64_t& w = bits_[r * words_ + c / 64];
    const uint64_t m = uint64_t{1} << (c % 64);
    if (v) w |= m; else w &= ~m;
  }
  void toggle(size_t r, size_t c) { bits_[r * words_ + c / 64] ^= uint64_t{1} << (c % 64); }

  const uint64_t* row(size_t r) const { return bits_.data() + r * words_; }
  uint64_t* row(size_t r) { return bits_.data() + r * words_; }

  void clear_row(size_t r) {
    for (size_t w = 0; w < words_; ++w) bits_[r * words_ + w] = 0;
  }
  void xor_row(size_t dst, size_t src) {
    uint64_t* d = row(dst);
    const uint64_t* s = row(src);
    for (size_t w = 0; w < words_; ++w) d[w] ^= s[w];
  }
  void swap_rows(size_t a, size_t b) {
    if (a == b) return;
    uint64_t* pa = row(a);
    uint64_t* pb = row(b);
    for (size_t w = 0; w < words_; ++w) std::swap(pa[w], pb[w]);
  }
  size_t row_popcount(size_t r) const;
  bool row_empty(size_t r) const {
    const uint64_t* p = row(r);
    for (size_t w = 0; w < words_; ++w)
      if (p[w]) return false;
    return true;
  }

 private:
  size_t rows_ = 0, cols_ = 0, words_ = 0;
  std::vector<uint64_t> bits_;
};

/// Rank over GF(2) by in-place Gaussian elimination of a copy.
size_t gf2_rank(BitMatrix m);

}  // namespace sepsim
