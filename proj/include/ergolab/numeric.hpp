#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ergolab {

// Exact rational arithmetic for set measures and their products.  Measures on
// an n-cell space are integers over n; products and chained functionals can
// grow beyond any fixed-width denominator, so the backing integers are
// arbitrary precision.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  return Rational(num, den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }

// Base error for all ergolab failures.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Two operands live on cell spaces of different sizes.
struct SpaceMismatchError : Error {
  explicit SpaceMismatchError(const std::string& msg) : Error(msg) {}
};

// A construction would exceed the configured cell-count cap.
struct CellCapError : Error {
  explicit CellCapError(const std::string& msg) : Error(msg) {}
};

// Bad parameters, malformed configs, violated preconditions.
struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Process-wide cap on cell counts.  Products and word models multiply sizes;
// the cap turns silent blow-up into a typed error.
std::uint64_t cell_cap();
void set_cell_cap(std::uint64_t cap);
constexpr std::uint64_t kDefaultCellCap = std::uint64_t{1} << 24;

void check_cell_cap(std::uint64_t requested, const char* what);

}  // namespace ergolab
