#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ergolab {

// Fixed-size bitset over cell indices.  All set functionals reduce to
// popcounts of word-wise combinations, so this is the hot kernel of the
// library.  Unused tail bits of the last word are kept zero.
class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  std::size_t and_count(const CellMask& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += std::popcount(words_[i] & o.words_[i]);
    return c;
  }

  std::size_t xor_count(const CellMask& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += std::popcount(words_[i] ^ o.words_[i]);
    return c;
  }

  // Intersection of three masks, counted without materializing.
  static std::size_t and3_count(const CellMask& a, const CellMask& b, const CellMask& c) {
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      cnt += std::popcount(a.words_[i] & b.words_[i] & c.words_[i]);
    return cnt;
  }

  CellMask operator&(const CellMask& o) const {
    CellMask r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & o.words_[i];
    return r;
  }

  bool operator==(const CellMask& o) const { return n_ == o.n_ && words_ == o.words_; }

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        const int b = std::countr_zero(w);
        fn(wi * 64 + static_cast<std::size_t>(b));
        w &= w - 1;
      }
    }
  }

  // Image under a forward permutation array.
  CellMask image(const std::vector<std::uint32_t>& forward) const {
    CellMask r(n_);
    for_each_set([&](std::size_t i) { r.set(forward[i]); });
    return r;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace ergolab
