#include "ergolab/systems.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "ergolab/rng.hpp"

namespace ergolab {

namespace {

std::uint64_t ipow(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    if (b != 0 && r > ~std::uint64_t{0} / b) throw ValidationError("cell count overflows 64 bits");
    r *= b;
  }
  return r;
}

}  // namespace

std::uint64_t SystemDescriptor::cell_count() const {
  switch (kind) {
    case SystemKind::identity:
    case SystemKind::cyclic_rotation:
    case SystemKind::random_permutation:
      return n;
    case SystemKind::odometer:
      return ipow(base, levels);
    case SystemKind::bernoulli_cyclic:
      return ipow(alphabet, window);
  }
  throw ValidationError("unknown system kind");
}

std::string SystemDescriptor::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case SystemKind::identity: os << "identity(" << n << ")"; break;
    case SystemKind::cyclic_rotation: os << "cyclic_rotation(" << n << ")"; break;
    case SystemKind::odometer: os << "odometer(" << base << "," << levels << ")"; break;
    case SystemKind::bernoulli_cyclic: os << "bernoulli_cyclic(" << alphabet << "," << window << ")"; break;
    case SystemKind::random_permutation: os << "random_permutation(" << n << "," << seed << ")"; break;
  }
  return os.str();
}

SystemDescriptor SystemDescriptor::parse(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ValidationError("system descriptor must look like kind(args): " + text);
  std::string name = text.substr(0, open);
  name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
  std::vector<std::uint64_t> args;
  std::string body = text.substr(open + 1, close - open - 1);
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (tok.empty()) throw ValidationError("empty argument in descriptor: " + text);
    args.push_back(std::stoull(tok));
  }
  SystemDescriptor d;
  auto need = [&](std::size_t count) {
    if (args.size() != count)
      throw ValidationError(name + " takes " + std::to_string(count) + " argument(s)");
  };
  if (name == "identity") {
    d.kind = SystemKind::identity; need(1); d.n = args[0];
  } else if (name == "cyclic_rotation") {
    d.kind = SystemKind::cyclic_rotation; need(1); d.n = args[0];
  } else if (name == "odometer") {
    d.kind = SystemKind::odometer; need(2);
    d.base = static_cast<std::uint32_t>(args[0]);
    d.levels = static_cast<std::uint32_t>(args[1]);
  } else if (name == "bernoulli_cyclic") {
    d.kind = SystemKind::bernoulli_cyclic; need(2);
    d.alphabet = static_cast<std::uint32_t>(args[0]);
    d.window = static_cast<std::uint32_t>(args[1]);
  } else if (name == "random_permutation") {
    d.kind = SystemKind::random_permutation; need(2);
    d.n = args[0];
    d.seed = args[1];
  } else {
    throw ValidationError("unknown system kind: " + name);
  }
  return d;
}

CellAutomorphism make_system(const SystemDescriptor& d) {
  switch (d.kind) {
    case SystemKind::identity:
      return make_identity(static_cast<std::uint32_t>(d.n));
    case SystemKind::cyclic_rotation:
      return make_cyclic_rotation(static_cast<std::uint32_t>(d.n));
    case SystemKind::odometer:
      return make_odometer(d.base, d.levels);
    case SystemKind::bernoulli_cyclic:
      return make_bernoulli_cyclic(d.alphabet, d.window);
    case SystemKind::random_permutation:
      return make_random_automorphism(static_cast<std::uint32_t>(d.n), d.seed);
  }
  throw ValidationError("unknown system kind");
}

CellAutomorphism make_identity(std::uint32_t n) {
  check_cell_cap(n, "make_identity");
  return CellAutomorphism::identity(n);
}

CellAutomorphism make_cyclic_rotation(std::uint32_t n) {
  check_cell_cap(n, "make_cyclic_rotation");
  if (n < 1) throw ValidationError("rotation needs at least one cell");
  std::vector<std::uint32_t> f(n), g(n);
  for (std::uint32_t c = 0; c < n; ++c) {
    f[c] = (c + 1) % n;
    g[c] = (c + n - 1) % n;
  }
  return CellAutomorphism(std::move(f), std::move(g));
}

CellAutomorphism make_odometer(std::uint32_t base, std::uint32_t levels) {
  if (base < 2 || levels < 1) throw ValidationError("odometer needs base >= 2, levels >= 1");
  const std::uint64_t n = ipow(base, levels);
  check_cell_cap(n, "make_odometer");
  // Adding one with carry to a little-endian digit string indexed by value is
  // the +1 map on the index.
  return make_cyclic_rotation(static_cast<std::uint32_t>(n));
}

CellAutomorphism make_bernoulli_cyclic(std::uint32_t k, std::uint32_t window) {
  if (k < 2 || window < 2) throw ValidationError("bernoulli_cyclic needs k >= 2, window >= 2");
  const std::uint64_t n = ipow(k, window);
  check_cell_cap(n, "make_bernoulli_cyclic");
  const std::uint32_t nn = static_cast<std::uint32_t>(n);
  std::vector<std::uint32_t> f(nn), g(nn);
  const std::uint64_t top = n / k;
  for (std::uint32_t w = 0; w < nn; ++w) {
    // (Tw)_c = w_{(c+1) mod L}: shift digits down, move digit 0 to the top.
    const std::uint64_t shifted = w / k + (std::uint64_t{w} % k) * top;
    f[w] = static_cast<std::uint32_t>(shifted);
    g[shifted] = w;
  }
  return CellAutomorphism(std::move(f), std::move(g));
}

CellAutomorphism make_random_automorphism(std::uint32_t n, std::uint64_t seed) {
  check_cell_cap(n, "make_random_automorphism");
  if (n < 1) throw ValidationError("random automorphism needs at least one cell");
  return CellAutomorphism(random_permutation_array(n, seed));
}

DenseFamily canonical_family(CellSpace space, std::size_t i_max) {
  if (i_max < 1) throw ValidationError("family length must be >= 1");
  std::vector<CellSet> sets;
  sets.reserve(i_max);
  for (std::size_t i = 1; i <= i_max; ++i) {
    std::size_t m = 0;
    while ((std::size_t{2} << m) <= i) ++m;  // 2^m <= i < 2^{m+1}
    const std::size_t r = i - (std::size_t{1} << m);
    const std::uint64_t lo = (static_cast<std::uint64_t>(r) * space.n) >> m;
    const std::uint64_t hi = (static_cast<std::uint64_t>(r + 1) * space.n) >> m;
    sets.push_back(CellSet::index_range(space, lo, hi));
  }
  return DenseFamily(std::move(sets));
}

DenseFamily single_coordinate_family(std::uint32_t k, std::uint32_t window, std::size_t count,
                                     std::uint32_t symbol) {
  if (count > window) throw ValidationError("more coordinate sets than coordinates");
  if (symbol >= k) throw ValidationError("symbol out of alphabet");
  const std::uint64_t n = ipow(k, window);
  check_cell_cap(n, "single_coordinate_family");
  CellSpace space(static_cast<std::uint32_t>(n));
  std::vector<CellSet> sets;
  for (std::size_t coord = 0; coord < count; ++coord) {
    CellMask m(space.n);
    std::uint64_t p = 1;
    for (std::size_t c = 0; c < coord; ++c) p *= k;
    for (std::uint32_t w = 0; w < space.n; ++w)
      if ((w / p) % k == symbol) m.set(w);
    sets.emplace_back(space, std::move(m));
  }
  return DenseFamily(std::move(sets));
}

Partition coordinate_partition(const SystemDescriptor& d, std::uint32_t coord) {
  if (d.kind != SystemKind::bernoulli_cyclic)
    throw ValidationError("coordinate_partition needs a bernoulli_cyclic system");
  if (coord >= d.window) throw ValidationError("coordinate out of range");
  const std::uint64_t n = d.cell_count();
  check_cell_cap(n, "coordinate_partition");
  std::uint64_t p = 1;
  for (std::uint32_t c = 0; c < coord; ++c) p *= d.alphabet;
  std::vector<std::int32_t> labels(n);
  for (std::uint64_t w = 0; w < n; ++w)
    labels[w] = static_cast<std::int32_t>((w / p) % d.alphabet);
  return Partition(static_cast<std::uint32_t>(n), std::move(labels));
}

Partition block_partition(CellSpace space, std::uint32_t classes) {
  if (classes < 1 || classes > space.n) throw ValidationError("bad block class count");
  std::vector<std::int32_t> labels(space.n);
  for (std::uint32_t c = 0; c < space.n; ++c)
    labels[c] = static_cast<std::int32_t>((static_cast<std::uint64_t>(c) * classes) / space.n);
  return Partition(space.n, std::move(labels));
}

Partition random_partition(CellSpace space, std::uint32_t classes, std::uint64_t seed) {
  if (classes < 1) throw ValidationError("bad class count");
  SplitMix64 gen(seed);
  std::vector<std::int32_t> labels(space.n);
  for (std::uint32_t c = 0; c < space.n; ++c)
    labels[c] = static_cast<std::int32_t>(gen.bounded(classes));
  return Partition(space.n, std::move(labels)).canonical();
}

}  // namespace ergolab
