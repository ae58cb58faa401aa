#include "ergolab/rng.hpp"

#include <numeric>

namespace ergolab {

std::vector<std::uint32_t> random_permutation_array(std::uint32_t n, std::uint64_t seed) {
  std::vector<std::uint32_t> f(n);
  std::iota(f.begin(), f.end(), 0u);
  SplitMix64 gen(seed);
  for (std::uint32_t i = n; i > 1; --i) {
    const std::uint32_t j = static_cast<std::uint32_t>(gen.bounded(i));
    std::swap(f[i - 1], f[j]);
  }
  return f;
}

}  // namespace ergolab
