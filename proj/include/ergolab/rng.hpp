#pragma once

#include <cstdint>
#include <vector>

namespace ergolab {

// splitmix64: the fixed 64-bit generator used everywhere randomness is
// needed.  Chosen because its output sequence is defined by the algorithm
// alone, so identical seeds give identical streams on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw from [0, bound) by rejection.
  std::uint64_t bounded(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    std::uint64_t v;
    do {
      v = next();
    } while (v > limit);
    return v % bound;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Deterministic per-trial seed: mixes the master seed with the trial index so
// trials can run in any order or in parallel.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 g(master ^ (0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL));
  return g.next();
}

// Fisher-Yates shuffle of 0..n-1, descending index convention.
std::vector<std::uint32_t> random_permutation_array(std::uint32_t n, std::uint64_t seed);

}  // namespace ergolab
