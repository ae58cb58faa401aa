#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ergolab/bitset.hpp"
#include "ergolab/numeric.hpp"

namespace ergolab {

// Finite probability space of n equal-mass cells.  Every measurable set is a
// subset of cells and every measure is the exact rational |set|/n;  two
// spaces with the same n are the same space.
struct CellSpace {
  std::uint32_t n = 0;

  explicit CellSpace(std::uint32_t count) : n(count) {
    if (n < 1) throw ValidationError("cell space needs at least one cell");
  }
  bool operator==(const CellSpace& o) const { return n == o.n; }
};

class CellSet {
 public:
  CellSet(CellSpace space, CellMask mask) : n_(space.n), mask_(std::move(mask)) {
    if (mask_.size() != n_) throw SpaceMismatchError("mask size differs from cell count");
  }
  CellSet(CellSpace space, const std::vector<std::uint32_t>& members) : n_(space.n), mask_(space.n) {
    for (auto c : members) {
      if (c >= n_) throw ValidationError("cell index out of range");
      mask_.set(c);
    }
  }
  static CellSet full(CellSpace space) {
    CellMask m(space.n);
    for (std::uint32_t c = 0; c < space.n; ++c) m.set(c);
    return CellSet(space, std::move(m));
  }
  static CellSet index_range(CellSpace space, std::uint64_t lo, std::uint64_t hi) {
    CellMask m(space.n);
    for (std::uint64_t c = lo; c < hi && c < space.n; ++c) m.set(static_cast<std::uint32_t>(c));
    return CellSet(space, std::move(m));
  }

  std::uint32_t space_size() const { return n_; }
  const CellMask& mask() const { return mask_; }
  std::size_t cardinality() const { return mask_.count(); }
  Rational measure() const { return Rational(static_cast<std::int64_t>(cardinality()), n_); }
  bool contains(std::uint32_t c) const { return mask_.test(c); }
  bool operator==(const CellSet& o) const { return n_ == o.n_ && mask_ == o.mask_; }

 private:
  std::uint32_t n_;
  CellMask mask_;
};

Rational intersection_measure(const CellSet& a, const CellSet& b);
Rational symmetric_difference_measure(const CellSet& a, const CellSet& b);

// Real-valued function on cells; inner products carry the 1/n cell mass.
struct CellFunction {
  std::uint32_t n = 0;
  std::vector<double> values;

  CellFunction(CellSpace space, std::vector<double> v) : n(space.n), values(std::move(v)) {
    if (values.size() != n) throw SpaceMismatchError("value count differs from cell count");
  }
  static CellFunction indicator(const CellSet& a);
  static CellFunction constant(CellSpace space, double v) {
    return CellFunction(space, std::vector<double>(space.n, v));
  }
  double mean() const;
  double norm() const;  // sqrt((1/n) sum f^2)
};

double inner_product(const CellFunction& f, const CellFunction& g);

// Invertible measure-preserving transformation: a permutation of cells, held
// with its inverse so both directions are O(1) lookups.
class CellAutomorphism {
 public:
  explicit CellAutomorphism(std::vector<std::uint32_t> forward);
  CellAutomorphism(std::vector<std::uint32_t> forward, std::vector<std::uint32_t> inverse);

  static CellAutomorphism identity(std::uint32_t n);

  std::uint32_t space_size() const { return static_cast<std::uint32_t>(forward_.size()); }
  CellSpace space() const { return CellSpace(space_size()); }
  const std::vector<std::uint32_t>& forward() const { return forward_; }
  const std::vector<std::uint32_t>& inverse() const { return inverse_; }
  std::uint32_t apply(std::uint32_t c) const { return forward_[c]; }
  std::uint32_t apply_inverse(std::uint32_t c) const { return inverse_[c]; }

  bool is_identity() const;
  bool operator==(const CellAutomorphism& o) const { return forward_ == o.forward_; }

  // Order of the permutation (lcm of cycle lengths), or nullopt when it
  // exceeds `limit`.
  std::optional<std::uint64_t> order(std::uint64_t limit) const;

  std::vector<std::vector<std::uint32_t>> cycles() const;

 private:
  std::vector<std::uint32_t> forward_;
  std::vector<std::uint32_t> inverse_;
};

CellAutomorphism inverse(const CellAutomorphism& t);

// compose(a, b): apply b first, then a.
CellAutomorphism compose(const CellAutomorphism& a, const CellAutomorphism& b);

// t^s for any signed s; s = 0 gives the identity.
CellAutomorphism power(const CellAutomorphism& t, std::int64_t s);

CellSet apply_set(const CellAutomorphism& t, const CellSet& a);

// Koopman action with the convention (Tf)(x) = f(T^{-1} x), so that
// <T^j 1_B, 1_A> = mu(A intersect T^j B).
CellFunction koopman_apply(const CellAutomorphism& t, const CellFunction& f);

// Acts on pairs (x, y) -> (Sx, Ty); pair index is x * n_t + y.
CellAutomorphism direct_product(const CellAutomorphism& s, const CellAutomorphism& t);

// Product-space function f(x)g(y) on the paired index.
CellFunction tensor_function(const CellFunction& f, const CellFunction& g);

// Skew product R(x, y) = (Sx, R_x y): a base automorphism with one fiber
// automorphism per base cell, realized as a permutation of the paired index.
// When the base is the identity this is an element of the class of skew
// products over Id (a measurable family of fiber automorphisms).
class SkewSystem {
 public:
  SkewSystem(CellAutomorphism base, std::vector<CellAutomorphism> fibers);

  const CellAutomorphism& base() const { return base_; }
  const std::vector<CellAutomorphism>& fibers() const { return fibers_; }
  const CellAutomorphism& fiber(std::uint32_t x) const { return fibers_[x]; }
  const CellAutomorphism& product() const { return product_; }
  std::uint32_t base_size() const { return base_.space_size(); }
  std::uint32_t fiber_size() const { return fibers_.front().space_size(); }
  bool over_identity() const { return base_.is_identity(); }

  std::uint64_t pair_index(std::uint32_t x, std::uint32_t y) const {
    return static_cast<std::uint64_t>(x) * fiber_size() + y;
  }

 private:
  CellAutomorphism base_;
  std::vector<CellAutomorphism> fibers_;
  CellAutomorphism product_;
};

SkewSystem build_skew(const CellAutomorphism& base, std::vector<CellAutomorphism> fibers);

// Trivial extension S x Id as a skew system.
SkewSystem trivial_extension(const CellAutomorphism& base, std::uint32_t fiber_n);

// J^{-1} R J for J over the identity; fixes the base marginal, fiber maps
// become Q_{Sx}^{-1} R_x Q_x.
SkewSystem conjugate(const SkewSystem& r, const SkewSystem& j);

// Weighted family {A_i} with weights 2^{-i} (1-based); stands in for a dense
// family in the sigma-algebra, truncated at its declared length.
struct DenseFamily {
  std::vector<CellSet> sets;

  explicit DenseFamily(std::vector<CellSet> s);
  std::size_t size() const { return sets.size(); }
  const CellSet& at(std::size_t i1) const { return sets.at(i1 - 1); }  // 1-based
  std::uint32_t space_size() const { return sets.front().space_size(); }
};

// Truncated Halmos distance over a dense family, plus the exact bound on the
// dropped terms: each term is at most 2^{-i} * 2, so the tail is 2^{1-I}.
struct HalmosDistance {
  Rational value;
  Rational tail_bound;
  double value_d() const { return to_double(value); }
};

HalmosDistance halmos_distance(const CellAutomorphism& s, const CellAutomorphism& t,
                               const DenseFamily& fam);

}  // namespace ergolab
