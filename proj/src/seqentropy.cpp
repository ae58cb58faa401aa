#include "ergolab/seqentropy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace ergolab {

Partition::Partition(std::uint32_t cells, std::vector<std::int32_t> lab)
    : n(cells), labels(std::move(lab)) {
  if (labels.size() != n) throw SpaceMismatchError("label count differs from cell count");
  std::int32_t max_label = -1;
  for (auto l : labels) {
    if (l < 0) throw ValidationError("negative partition label");
    max_label = std::max(max_label, l);
  }
  std::vector<bool> used(static_cast<std::size_t>(max_label) + 1, false);
  for (auto l : labels) used[static_cast<std::size_t>(l)] = true;
  for (bool u : used)
    if (!u) throw ValidationError("partition labels must be dense 0..k-1");
  class_count = static_cast<std::uint32_t>(max_label + 1);
}

std::vector<std::uint64_t> Partition::class_counts() const {
  std::vector<std::uint64_t> counts(class_count, 0);
  for (auto l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

Partition Partition::from_labels(std::uint32_t cells, const std::vector<std::int64_t>& raw) {
  if (raw.size() != cells) throw SpaceMismatchError("label count differs from cell count");
  std::unordered_map<std::int64_t, std::int32_t> remap;
  remap.reserve(cells);
  std::vector<std::int32_t> out(cells);
  std::int32_t next = 0;
  for (std::uint32_t c = 0; c < cells; ++c) {
    if (raw[c] < 0) throw ValidationError("negative partition label");
    auto [it, inserted] = remap.try_emplace(raw[c], next);
    if (inserted) ++next;
    out[c] = it->second;
  }
  return Partition(cells, std::move(out));
}

Partition Partition::canonical() const {
  std::vector<std::int32_t> remap(class_count, -1);
  std::vector<std::int32_t> out(n);
  std::int32_t next = 0;
  for (std::uint32_t c = 0; c < n; ++c) {
    std::int32_t& m = remap[static_cast<std::size_t>(labels[c])];
    if (m < 0) m = next++;
    out[c] = m;
  }
  return Partition(n, std::move(out));
}

double entropy_from_counts(std::vector<std::uint64_t> counts, std::uint64_t n) {
  counts.erase(std::remove(counts.begin(), counts.end(), std::uint64_t{0}), counts.end());
  std::sort(counts.begin(), counts.end());
  // H = ln n - (1/n) sum c ln c; sorted accumulation keeps the value
  // identical across relabelings of the same count multiset.
  double acc = 0.0;
  for (std::uint64_t c : counts) acc += static_cast<double>(c) * std::log(static_cast<double>(c));
  return std::log(static_cast<double>(n)) - acc / static_cast<double>(n);
}

double partition_entropy(const Partition& p) { return entropy_from_counts(p.class_counts(), p.n); }

namespace {

// Per-lag label arrays lab_p[x] = xi(T^{-p} x).  Small lags walk the power
// incrementally (one gather per step); large lags use binary exponentiation.
std::vector<std::vector<std::int32_t>> shifted_labels(const CellAutomorphism& t,
                                                      const Partition& xi,
                                                      const std::vector<std::int64_t>& lags) {
  if (t.space_size() != xi.n) throw SpaceMismatchError("refine across spaces");
  const std::uint32_t n = xi.n;
  std::int64_t max_abs = 0;
  for (const std::int64_t p : lags) max_abs = std::max(max_abs, p < 0 ? -p : p);
  std::vector<std::vector<std::int32_t>> out(lags.size());
  if (max_abs <= 256) {
    for (const int sign : {+1, -1}) {
      std::int64_t needed = 0;
      for (const std::int64_t p : lags)
        if ((sign > 0 && p > 0) || (sign < 0 && p < 0)) needed = std::max(needed, sign * p);
      if (needed == 0 && sign < 0) continue;
      // cur[x] = T^{-sign*p}(x), advanced one composition per step.
      std::vector<std::uint32_t> cur(n), next(n);
      for (std::uint32_t x = 0; x < n; ++x) cur[x] = x;
      const auto& step = sign > 0 ? t.inverse() : t.forward();
      for (std::int64_t p = 0; p <= needed; ++p) {
        if (p > 0) {
          for (std::uint32_t x = 0; x < n; ++x) next[x] = step[cur[x]];
          cur.swap(next);
        }
        for (std::size_t li = 0; li < lags.size(); ++li) {
          if (lags[li] != sign * p || !out[li].empty()) continue;
          std::vector<std::int32_t> lab(n);
          for (std::uint32_t x = 0; x < n; ++x) lab[x] = xi.labels[cur[x]];
          out[li] = std::move(lab);
        }
      }
    }
    for (std::size_t li = 0; li < lags.size(); ++li) {
      if (!out[li].empty()) continue;  // duplicate lag: copy the first instance
      for (std::size_t lj = 0; lj < li; ++lj)
        if (lags[lj] == lags[li]) { out[li] = out[lj]; break; }
    }
    return out;
  }
  for (std::size_t li = 0; li < lags.size(); ++li) {
    const CellAutomorphism tp = power(t, -lags[li]);
    std::vector<std::int32_t> lab(n);
    for (std::uint32_t x = 0; x < n; ++x) lab[x] = xi.labels[tp.apply(x)];
    out[li] = std::move(lab);
  }
  return out;
}

constexpr std::uint64_t kPackedKeyLimit = std::uint64_t{1} << 22;

bool packable(std::uint32_t class_count, std::size_t lag_count, std::uint64_t& key_space) {
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < lag_count; ++i) {
    if (space > kPackedKeyLimit / class_count) return false;
    space *= class_count;
  }
  key_space = space;
  return true;
}

}  // namespace

std::vector<std::uint64_t> refinement_class_counts(const CellAutomorphism& t, const Partition& xi,
                                                   const std::vector<std::int64_t>& lags) {
  if (lags.empty()) throw ValidationError("refinement needs at least one lag");
  const auto shifted = shifted_labels(t, xi, lags);
  const std::uint32_t n = xi.n;
  std::uint64_t key_space = 0;
  if (packable(xi.class_count, lags.size(), key_space)) {
    std::vector<std::uint64_t> counts(key_space, 0);
    for (std::uint32_t x = 0; x < n; ++x) {
      std::uint64_t key = 0;
      for (const auto& lab : shifted) key = key * xi.class_count + static_cast<std::uint32_t>(lab[x]);
      ++counts[key];
    }
    counts.erase(std::remove(counts.begin(), counts.end(), std::uint64_t{0}), counts.end());
    return counts;
  }
  // Incremental pairing: relabel after each lag so keys stay below n * k.
  std::vector<std::int32_t> cur(n, 0);
  std::int32_t classes = 1;
  for (const auto& lab : shifted) {
    std::unordered_map<std::uint64_t, std::int32_t> remap;
    remap.reserve(n);
    std::int32_t next = 0;
    for (std::uint32_t x = 0; x < n; ++x) {
      const std::uint64_t key =
          static_cast<std::uint64_t>(cur[x]) * xi.class_count + static_cast<std::uint32_t>(lab[x]);
      auto [it, inserted] = remap.try_emplace(key, next);
      if (inserted) ++next;
      cur[x] = it->second;
    }
    classes = next;
  }
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(classes), 0);
  for (std::uint32_t x = 0; x < n; ++x) ++counts[static_cast<std::size_t>(cur[x])];
  return counts;
}

Partition refine(const CellAutomorphism& t, const Partition& xi, const std::vector<std::int64_t>& lags) {
  if (lags.empty()) throw ValidationError("refinement needs at least one lag");
  const auto shifted = shifted_labels(t, xi, lags);
  const std::uint32_t n = xi.n;
  std::vector<std::int32_t> cur(n, 0);
  for (const auto& lab : shifted) {
    std::unordered_map<std::uint64_t, std::int32_t> remap;
    remap.reserve(n);
    std::int32_t next = 0;
    for (std::uint32_t x = 0; x < n; ++x) {
      const std::uint64_t key =
          static_cast<std::uint64_t>(cur[x]) * xi.class_count + static_cast<std::uint32_t>(lab[x]);
      auto [it, inserted] = remap.try_emplace(key, next);
      if (inserted) ++next;
      cur[x] = it->second;
    }
  }
  return Partition(n, std::move(cur));
}

Partition image_partition(const CellAutomorphism& phi, const Partition& xi) {
  if (phi.space_size() != xi.n) throw SpaceMismatchError("image_partition across spaces");
  std::vector<std::int32_t> labels(xi.n);
  for (std::uint32_t z = 0; z < xi.n; ++z) labels[z] = xi.labels[phi.apply_inverse(z)];
  return Partition(xi.n, std::move(labels));
}

Partition lift_fiber_partition(std::uint32_t base_n, const Partition& xi) {
  const std::uint64_t n = std::uint64_t{base_n} * xi.n;
  check_cell_cap(n, "lift_fiber_partition");
  std::vector<std::int32_t> labels(n);
  for (std::uint32_t x = 0; x < base_n; ++x)
    for (std::uint32_t y = 0; y < xi.n; ++y) labels[std::uint64_t{x} * xi.n + y] = xi.labels[y];
  return Partition(static_cast<std::uint32_t>(n), std::move(labels));
}

double sequence_entropy_term(const CellAutomorphism& t, const Partition& xi,
                             const std::vector<std::int64_t>& lags) {
  const auto counts = refinement_class_counts(t, xi, lags);
  return entropy_from_counts(counts, xi.n) / static_cast<double>(lags.size());
}

SequenceFamily SequenceFamily::progression(std::uint32_t length) {
  if (length < 1) throw ValidationError("progression length must be >= 1");
  SequenceFamily f;
  f.kind = Kind::progression;
  f.fixed_length = length;
  f.description = "progression L=" + std::to_string(length);
  return f;
}

SequenceFamily SequenceFamily::progression_growing() {
  SequenceFamily f;
  f.kind = Kind::progression;
  f.fixed_length = 0;
  f.description = "progression L(j)=j";
  return f;
}

SequenceFamily SequenceFamily::geometric(std::vector<std::uint32_t> exponent_breaks) {
  if (exponent_breaks.size() < 2) throw ValidationError("geometric family needs >= 2 breaks");
  for (std::size_t i = 1; i < exponent_breaks.size(); ++i)
    if (exponent_breaks[i] <= exponent_breaks[i - 1])
      throw ValidationError("geometric breaks must increase");
  if (exponent_breaks.back() >= 62) throw ValidationError("geometric exponent too large");
  SequenceFamily f;
  f.kind = Kind::geometric;
  f.breaks = std::move(exponent_breaks);
  f.description = "geometric dyadic blocks";
  return f;
}

SequenceFamily SequenceFamily::explicit_family(
    std::map<std::uint32_t, std::vector<std::int64_t>> lags) {
  SequenceFamily f;
  f.kind = Kind::explicit_list;
  f.explicit_lags = std::move(lags);
  f.description = "explicit lag sets";
  return f;
}

std::vector<std::int64_t> SequenceFamily::lags(std::uint32_t j) const {
  if (j < 1) throw ValidationError("sequence index must be >= 1");
  switch (kind) {
    case Kind::progression: {
      const std::uint32_t length = fixed_length == 0 ? j : fixed_length;
      std::vector<std::int64_t> out;
      out.reserve(length);
      for (std::uint32_t m = 1; m <= length; ++m) out.push_back(static_cast<std::int64_t>(m) * j);
      return out;
    }
    case Kind::geometric: {
      if (j >= breaks.size()) throw ValidationError("geometric family index out of schedule");
      std::vector<std::int64_t> out;
      for (std::uint32_t e = breaks[j - 1]; e < breaks[j]; ++e)
        out.push_back(std::int64_t{1} << e);
      return out;
    }
    case Kind::explicit_list: {
      const auto it = explicit_lags.find(j);
      if (it == explicit_lags.end()) throw ValidationError("no explicit lag set for this index");
      return it->second;
    }
  }
  throw ValidationError("unknown sequence family kind");
}

HpEstimate hp_estimate(const CellAutomorphism& t, const Partition& xi, const SequenceFamily& fam,
                       const std::vector<std::uint32_t>& j_values) {
  if (j_values.empty()) throw ValidationError("hp_estimate needs a nonempty scan range");
  HpEstimate est;
  for (const std::uint32_t j : j_values) {
    const auto lags = fam.lags(j);
    const auto counts = refinement_class_counts(t, xi, lags);
    const double h = entropy_from_counts(counts, xi.n);
    const double hj = h / static_cast<double>(lags.size());
    est.rows.push_back({j, lags.size(), h, hj});
    est.estimate = std::max(est.estimate, hj);
    est.j_max = std::max(est.j_max, j);
  }
  est.note = "finite-horizon lower estimate of limsup_j h_j; scanned j <= " +
             std::to_string(est.j_max) + ", never extrapolated";
  return est;
}

namespace {

struct JointClass {
  std::uint64_t count;
  std::vector<std::int32_t> labels;  // one label per lag
};

std::vector<JointClass> joint_classes(const CellAutomorphism& t, const Partition& eta,
                                      const std::vector<std::int64_t>& lags) {
  const auto shifted = shifted_labels(t, eta, lags);
  const std::uint32_t n = eta.n;
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<JointClass> classes;
  std::uint64_t key_space = 0;
  if (packable(eta.class_count, lags.size(), key_space)) {
    index.reserve(256);
    for (std::uint32_t x = 0; x < n; ++x) {
      std::uint64_t key = 0;
      for (const auto& lab : shifted) key = key * eta.class_count + static_cast<std::uint32_t>(lab[x]);
      auto [it, inserted] = index.try_emplace(key, classes.size());
      if (inserted) {
        JointClass jc;
        jc.count = 0;
        jc.labels.resize(lags.size());
        std::uint64_t k = key;
        for (std::size_t i = lags.size(); i-- > 0;) {
          jc.labels[i] = static_cast<std::int32_t>(k % eta.class_count);
          k /= eta.class_count;
        }
        classes.push_back(std::move(jc));
      }
      ++classes[it->second].count;
    }
    return classes;
  }
  // Tuple path for wide refinements: hash the label tuple directly.
  struct TupleHash {
    std::size_t operator()(const std::vector<std::int32_t>& v) const {
      std::size_t h = 1469598103934665603ull;
      for (auto x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_map<std::vector<std::int32_t>, std::size_t, TupleHash> tuple_index;
  tuple_index.reserve(n);
  std::vector<std::int32_t> tuple(lags.size());
  for (std::uint32_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < shifted.size(); ++i) tuple[i] = shifted[i][x];
    auto [it, inserted] = tuple_index.try_emplace(tuple, classes.size());
    if (inserted) classes.push_back({0, tuple});
    ++classes[it->second].count;
  }
  return classes;
}

}  // namespace

bool jointly_independent(const CellAutomorphism& t, const Partition& eta,
                         const std::vector<std::int64_t>& lags) {
  const auto classes = joint_classes(t, eta, lags);
  const auto marginals = eta.class_counts();  // T^p eta has the counts of eta
  const BigInt n = eta.n;
  BigInt n_pow = 1;
  for (std::size_t i = 1; i < lags.size(); ++i) n_pow *= n;
  // Nonempty classes matching the product rule force the empty ones to match
  // as well, because both sides sum to n^L over all label tuples.
  for (const auto& jc : classes) {
    BigInt rhs = 1;
    for (const auto l : jc.labels) rhs *= marginals[static_cast<std::size_t>(l)];
    if (n_pow * jc.count != rhs) return false;
  }
  return true;
}

double independence_defect(const CellAutomorphism& t, const Partition& eta,
                           const std::vector<std::int64_t>& lags) {
  if (lags.empty()) throw ValidationError("independence defect needs lags");
  if (jointly_independent(t, eta, lags)) return 0.0;
  double sum_marginal = 0.0;
  for (const std::int64_t p : lags)
    sum_marginal += partition_entropy(image_partition(power(t, p), eta));
  const double joint = entropy_from_counts(refinement_class_counts(t, eta, lags), eta.n);
  return sum_marginal - joint;
}

ConjugationEntropyReport conjugation_entropy_experiment(const SkewSystem& product,
                                                        const SkewSystem& j_system,
                                                        const Partition& fiber_partition,
                                                        std::uint32_t progression_length,
                                                        const std::vector<std::uint32_t>& j_values) {
  const SkewSystem conjugated = ergolab::conjugate(product, j_system);
  const Partition lifted = lift_fiber_partition(product.base_size(), fiber_partition);
  const Partition image = image_partition(j_system.product(), lifted);
  ConjugationEntropyReport report;
  report.partition_entropy = partition_entropy(lifted);
  const SequenceFamily fam = SequenceFamily::progression(progression_length);
  for (const std::uint32_t j : j_values) {
    const auto lags = fam.lags(j);
    const double h_conj = sequence_entropy_term(conjugated.product(), lifted, lags);
    const double h_img = sequence_entropy_term(product.product(), image, lags);
    report.rows.push_back({j, h_conj, h_img, h_conj > report.partition_entropy / 2.0});
  }
  return report;
}

}  // namespace ergolab
