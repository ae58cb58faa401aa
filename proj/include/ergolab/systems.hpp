#pragma once

#include <cstdint>
#include <string>

#include "ergolab/cellsys.hpp"
#include "ergolab/seqtypes.hpp"

namespace ergolab {

// Named constructors for the systems used as witnesses throughout: the
// identity, cyclic rotations (rational approximants of irrational rotations),
// odometers, word-shift models of Bernoulli automorphisms, and seeded random
// permutations.

enum class SystemKind {
  identity,
  cyclic_rotation,
  odometer,
  bernoulli_cyclic,
  random_permutation,
};

struct SystemDescriptor {
  SystemKind kind = SystemKind::identity;
  std::uint64_t n = 1;       // identity, cyclic_rotation, random_permutation
  std::uint32_t base = 2;    // odometer
  std::uint32_t levels = 1;  // odometer
  std::uint32_t alphabet = 2;  // bernoulli_cyclic
  std::uint32_t window = 2;    // bernoulli_cyclic
  std::uint64_t seed = 0;      // random_permutation

  std::uint64_t cell_count() const;
  std::string to_string() const;
  // Grammar: kind(args), e.g. "cyclic_rotation(144)", "odometer(2,8)",
  // "bernoulli_cyclic(2,10)", "random_permutation(64,7)", "identity(4)".
  static SystemDescriptor parse(const std::string& text);
};

CellAutomorphism make_system(const SystemDescriptor& d);

CellAutomorphism make_identity(std::uint32_t n);
CellAutomorphism make_cyclic_rotation(std::uint32_t n);
CellAutomorphism make_odometer(std::uint32_t base, std::uint32_t levels);

// Cyclic coordinate shift on words of length L over {0..k-1}, indexed
// little-endian radix k: coordinate c of index v is (v / k^c) % k, and
// (Tw)_c = w_{(c+1) mod L}.  For events determined by coordinate windows that
// remain disjoint mod L after the lag shift, the product rule
// mu(A intersect T^j B) = mu(A) mu(B) holds with exact rational equality;
// outside that horizon the model is a plain finite permutation.
CellAutomorphism make_bernoulli_cyclic(std::uint32_t k, std::uint32_t window);

CellAutomorphism make_random_automorphism(std::uint32_t n, std::uint64_t seed);

// Dyadic index-block family: position i = 2^m + r (0 <= r < 2^m) is the block
// [r*n/2^m, (r+1)*n/2^m) with integer floor bounds; A_1 is the whole space.
DenseFamily canonical_family(CellSpace space, std::size_t i_max);

// A_i = {words with coordinate i-1 equal to symbol}; requires count <= window.
DenseFamily single_coordinate_family(std::uint32_t k, std::uint32_t window, std::size_t count,
                                     std::uint32_t symbol = 0);

// Partition of a bernoulli_cyclic system by the symbol at one coordinate.
Partition coordinate_partition(const SystemDescriptor& d, std::uint32_t coord);

// Partition into `classes` near-equal contiguous index blocks.
Partition block_partition(CellSpace space, std::uint32_t classes);

// Seeded uniform label assignment.
Partition random_partition(CellSpace space, std::uint32_t classes, std::uint64_t seed);

}  // namespace ergolab
