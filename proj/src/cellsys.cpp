#include "ergolab/cellsys.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

namespace ergolab {

namespace {
std::atomic<std::uint64_t> g_cell_cap{kDefaultCellCap};
}

std::uint64_t cell_cap() { return g_cell_cap.load(); }
void set_cell_cap(std::uint64_t cap) { g_cell_cap.store(cap); }

void check_cell_cap(std::uint64_t requested, const char* what) {
  if (requested > cell_cap())
    throw CellCapError(std::string(what) + ": " + std::to_string(requested) +
                       " cells exceeds cap " + std::to_string(cell_cap()));
}

Rational intersection_measure(const CellSet& a, const CellSet& b) {
  if (a.space_size() != b.space_size()) throw SpaceMismatchError("intersection across spaces");
  return Rational(static_cast<std::int64_t>(a.mask().and_count(b.mask())), a.space_size());
}

Rational symmetric_difference_measure(const CellSet& a, const CellSet& b) {
  if (a.space_size() != b.space_size()) throw SpaceMismatchError("symmetric difference across spaces");
  return Rational(static_cast<std::int64_t>(a.mask().xor_count(b.mask())), a.space_size());
}

CellFunction CellFunction::indicator(const CellSet& a) {
  std::vector<double> v(a.space_size(), 0.0);
  a.mask().for_each_set([&](std::size_t c) { v[c] = 1.0; });
  return CellFunction(CellSpace(a.space_size()), std::move(v));
}

double CellFunction::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / n;
}

double CellFunction::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s / n);
}

double inner_product(const CellFunction& f, const CellFunction& g) {
  if (f.n != g.n) throw SpaceMismatchError("inner product across spaces");
  double s = 0.0;
  for (std::uint32_t c = 0; c < f.n; ++c) s += f.values[c] * g.values[c];
  return s / f.n;
}

namespace {
std::vector<std::uint32_t> invert(const std::vector<std::uint32_t>& forward) {
  std::vector<std::uint32_t> inv(forward.size());
  std::vector<bool> seen(forward.size(), false);
  for (std::uint32_t i = 0; i < forward.size(); ++i) {
    const std::uint32_t j = forward[i];
    if (j >= forward.size() || seen[j]) throw ValidationError("forward map is not a permutation");
    seen[j] = true;
    inv[j] = i;
  }
  return inv;
}
}  // namespace

CellAutomorphism::CellAutomorphism(std::vector<std::uint32_t> forward)
    : forward_(std::move(forward)), inverse_(invert(forward_)) {
  if (forward_.empty()) throw ValidationError("empty permutation");
}

CellAutomorphism::CellAutomorphism(std::vector<std::uint32_t> forward,
                                   std::vector<std::uint32_t> inverse)
    : forward_(std::move(forward)), inverse_(std::move(inverse)) {
  if (forward_.empty() || inverse_.size() != forward_.size())
    throw ValidationError("inconsistent permutation pair");
  for (std::uint32_t i = 0; i < forward_.size(); ++i)
    if (inverse_[forward_[i]] != i || forward_[inverse_[i]] != i)
      throw ValidationError("inverse is not the inverse of forward");
}

CellAutomorphism CellAutomorphism::identity(std::uint32_t n) {
  std::vector<std::uint32_t> f(n);
  std::iota(f.begin(), f.end(), 0u);
  std::vector<std::uint32_t> g = f;
  return CellAutomorphism(std::move(f), std::move(g));
}

bool CellAutomorphism::is_identity() const {
  for (std::uint32_t i = 0; i < forward_.size(); ++i)
    if (forward_[i] != i) return false;
  return true;
}

std::optional<std::uint64_t> CellAutomorphism::order(std::uint64_t limit) const {
  std::uint64_t ord = 1;
  std::vector<bool> seen(forward_.size(), false);
  for (std::uint32_t start = 0; start < forward_.size(); ++start) {
    if (seen[start]) continue;
    std::uint64_t len = 0;
    std::uint32_t c = start;
    do {
      seen[c] = true;
      c = forward_[c];
      ++len;
    } while (c != start);
    const std::uint64_t g = std::gcd(ord, len);
    if (len / g > limit / ord) return std::nullopt;  // lcm would exceed limit
    ord = ord / g * len;
    if (ord > limit) return std::nullopt;
  }
  return ord;
}

std::vector<std::vector<std::uint32_t>> CellAutomorphism::cycles() const {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<bool> seen(forward_.size(), false);
  for (std::uint32_t start = 0; start < forward_.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::uint32_t> cyc;
    std::uint32_t c = start;
    do {
      seen[c] = true;
      cyc.push_back(c);
      c = forward_[c];
    } while (c != start);
    out.push_back(std::move(cyc));
  }
  return out;
}

CellAutomorphism inverse(const CellAutomorphism& t) {
  return CellAutomorphism(t.inverse(), t.forward());
}

CellAutomorphism compose(const CellAutomorphism& a, const CellAutomorphism& b) {
  if (a.space_size() != b.space_size()) throw SpaceMismatchError("compose across spaces");
  const std::uint32_t n = a.space_size();
  std::vector<std::uint32_t> f(n), g(n);
  for (std::uint32_t i = 0; i < n; ++i) f[i] = a.forward()[b.forward()[i]];
  for (std::uint32_t i = 0; i < n; ++i) g[i] = b.inverse()[a.inverse()[i]];
  return CellAutomorphism(std::move(f), std::move(g));
}

CellAutomorphism power(const CellAutomorphism& t, std::int64_t s) {
  const std::uint32_t n = t.space_size();
  if (s == 0) return CellAutomorphism::identity(n);
  CellAutomorphism base = s > 0 ? t : inverse(t);
  std::uint64_t e = s > 0 ? static_cast<std::uint64_t>(s) : static_cast<std::uint64_t>(-s);
  CellAutomorphism acc = CellAutomorphism::identity(n);
  while (e > 0) {
    if (e & 1) acc = compose(acc, base);
    e >>= 1;
    if (e > 0) base = compose(base, base);
  }
  return acc;
}

CellSet apply_set(const CellAutomorphism& t, const CellSet& a) {
  if (t.space_size() != a.space_size()) throw SpaceMismatchError("apply_set across spaces");
  return CellSet(CellSpace(a.space_size()), a.mask().image(t.forward()));
}

CellFunction koopman_apply(const CellAutomorphism& t, const CellFunction& f) {
  if (t.space_size() != f.n) throw SpaceMismatchError("koopman_apply across spaces");
  std::vector<double> v(f.n);
  for (std::uint32_t x = 0; x < f.n; ++x) v[x] = f.values[t.apply_inverse(x)];
  return CellFunction(CellSpace(f.n), std::move(v));
}

CellAutomorphism direct_product(const CellAutomorphism& s, const CellAutomorphism& t) {
  const std::uint64_t ns = s.space_size(), nt = t.space_size();
  check_cell_cap(ns * nt, "direct_product");
  const std::uint64_t n = ns * nt;
  std::vector<std::uint32_t> f(n), g(n);
  for (std::uint64_t x = 0; x < ns; ++x)
    for (std::uint64_t y = 0; y < nt; ++y) {
      f[x * nt + y] = static_cast<std::uint32_t>(std::uint64_t{s.forward()[x]} * nt + t.forward()[y]);
      g[x * nt + y] = static_cast<std::uint32_t>(std::uint64_t{s.inverse()[x]} * nt + t.inverse()[y]);
    }
  return CellAutomorphism(std::move(f), std::move(g));
}

CellFunction tensor_function(const CellFunction& f, const CellFunction& g) {
  const std::uint64_t n = std::uint64_t{f.n} * g.n;
  check_cell_cap(n, "tensor_function");
  std::vector<double> v(n);
  for (std::uint32_t x = 0; x < f.n; ++x)
    for (std::uint32_t y = 0; y < g.n; ++y) v[std::uint64_t{x} * g.n + y] = f.values[x] * g.values[y];
  return CellFunction(CellSpace(static_cast<std::uint32_t>(n)), std::move(v));
}

SkewSystem::SkewSystem(CellAutomorphism base, std::vector<CellAutomorphism> fibers)
    : base_(std::move(base)),
      fibers_(std::move(fibers)),
      product_(CellAutomorphism::identity(1)) {
  if (fibers_.size() != base_.space_size())
    throw ValidationError("fiber count differs from base cell count");
  const std::uint32_t m = fibers_.front().space_size();
  for (const auto& r : fibers_)
    if (r.space_size() != m) throw SpaceMismatchError("fibers live on different spaces");
  const std::uint64_t n = std::uint64_t{base_.space_size()} * m;
  check_cell_cap(n, "build_skew");
  std::vector<std::uint32_t> f(n), g(n);
  for (std::uint32_t x = 0; x < base_.space_size(); ++x) {
    const std::uint32_t sx = base_.forward()[x];
    const auto& rx = fibers_[x].forward();
    for (std::uint32_t y = 0; y < m; ++y)
      f[std::uint64_t{x} * m + y] = static_cast<std::uint32_t>(std::uint64_t{sx} * m + rx[y]);
  }
  for (std::uint64_t i = 0; i < n; ++i) g[f[i]] = static_cast<std::uint32_t>(i);
  product_ = CellAutomorphism(std::move(f), std::move(g));
}

SkewSystem build_skew(const CellAutomorphism& base, std::vector<CellAutomorphism> fibers) {
  return SkewSystem(base, std::move(fibers));
}

SkewSystem trivial_extension(const CellAutomorphism& base, std::uint32_t fiber_n) {
  std::vector<CellAutomorphism> fibers(base.space_size(), CellAutomorphism::identity(fiber_n));
  return SkewSystem(base, std::move(fibers));
}

SkewSystem conjugate(const SkewSystem& r, const SkewSystem& j) {
  if (!j.over_identity()) throw ValidationError("conjugating system must be over the identity");
  if (j.base_size() != r.base_size() || j.fiber_size() != r.fiber_size())
    throw SpaceMismatchError("conjugation spaces do not match");
  std::vector<CellAutomorphism> fibers;
  fibers.reserve(r.base_size());
  for (std::uint32_t x = 0; x < r.base_size(); ++x) {
    const std::uint32_t sx = r.base().forward()[x];
    fibers.push_back(compose(compose(inverse(j.fiber(sx)), r.fiber(x)), j.fiber(x)));
  }
  return SkewSystem(r.base(), std::move(fibers));
}

DenseFamily::DenseFamily(std::vector<CellSet> s) : sets(std::move(s)) {
  if (sets.empty()) throw ValidationError("dense family must be nonempty");
  const std::uint32_t n = sets.front().space_size();
  for (const auto& a : sets)
    if (a.space_size() != n) throw SpaceMismatchError("family sets on different spaces");
}

HalmosDistance halmos_distance(const CellAutomorphism& s, const CellAutomorphism& t,
                               const DenseFamily& fam) {
  if (s.space_size() != t.space_size() || s.space_size() != fam.space_size())
    throw SpaceMismatchError("halmos_distance across spaces");
  const CellAutomorphism si = inverse(s), ti = inverse(t);
  Rational total = 0;
  Rational weight(1, 2);
  for (std::size_t i = 1; i <= fam.size(); ++i) {
    const CellSet& a = fam.at(i);
    const Rational fwd = symmetric_difference_measure(apply_set(s, a), apply_set(t, a));
    const Rational bwd = symmetric_difference_measure(apply_set(si, a), apply_set(ti, a));
    total += weight * (fwd + bwd);
    weight /= 2;
  }
  // Dropped terms i > I_max are each at most 2^{-i} * 2.
  Rational tail = Rational(2) * weight * 2;
  return HalmosDistance{total, tail};
}

}  // namespace ergolab
