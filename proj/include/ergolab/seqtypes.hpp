#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ergolab/numeric.hpp"

namespace ergolab {

// Labeled decomposition of cells.  Labels are dense 0..class_count-1; the
// canonical form relabels by first occurrence so equality is bit-exact.
struct Partition {
  std::uint32_t n = 0;
  std::vector<std::int32_t> labels;
  std::uint32_t class_count = 0;

  Partition(std::uint32_t cells, std::vector<std::int32_t> lab);

  // Accepts arbitrary nonnegative labels and densifies them in
  // first-occurrence order.
  static Partition from_labels(std::uint32_t cells, const std::vector<std::int64_t>& raw);

  std::vector<std::uint64_t> class_counts() const;
  Partition canonical() const;
  bool operator==(const Partition& o) const { return n == o.n && labels == o.labels; }
};

// Schedule of finite lag sets P_j.  Progressions are {j, 2j, ..., L(j) j}
// with L either fixed or L(j) = j; geometric families are dyadic blocks
// {2^i : breaks[j-1] <= i < breaks[j]}; explicit families are given verbatim.
struct SequenceFamily {
  enum class Kind { progression, geometric, explicit_list };

  Kind kind = Kind::progression;
  std::uint32_t fixed_length = 0;  // L(j) = fixed_length, or = j when 0
  std::vector<std::uint32_t> breaks;
  std::map<std::uint32_t, std::vector<std::int64_t>> explicit_lags;
  std::string description;

  static SequenceFamily progression(std::uint32_t length);
  static SequenceFamily progression_growing();
  static SequenceFamily geometric(std::vector<std::uint32_t> exponent_breaks);
  static SequenceFamily explicit_family(std::map<std::uint32_t, std::vector<std::int64_t>> lags);

  std::vector<std::int64_t> lags(std::uint32_t j) const;
};

}  // namespace ergolab
