#include "ergolab/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergolab/parallel.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/seqentropy.hpp"

namespace ergolab {

CellAutomorphism cocycle(const SkewSystem& skew, std::uint32_t x, std::int64_t n) {
  if (n < 0) throw ValidationError("cocycle needs n >= 0");
  if (x >= skew.base_size()) throw ValidationError("base cell out of range");
  CellAutomorphism acc = CellAutomorphism::identity(skew.fiber_size());
  std::uint32_t bx = x;
  for (std::int64_t step = 0; step < n; ++step) {
    acc = compose(skew.fiber(bx), acc);
    bx = skew.base().apply(bx);
  }
  return acc;
}

CocycleCache::CocycleCache(const SkewSystem& skew, std::size_t max_cached_maps)
    : skew_(skew),
      budget_(max_cached_maps),
      prefixes_(skew.base_size()),
      orbit_next_(skew.base_size()),
      scratch_(CellAutomorphism::identity(skew.fiber_size())) {
  for (std::uint32_t x = 0; x < skew.base_size(); ++x) orbit_next_[x] = x;
}

const CellAutomorphism& CocycleCache::at(std::uint32_t x, std::uint32_t n) {
  auto& pref = prefixes_[x];
  if (pref.empty()) pref.push_back(CellAutomorphism::identity(skew_.fiber_size()));
  if (n < pref.size()) return pref[n];
  if (stored_ + (n + 1 - pref.size()) <= budget_) {
    while (pref.size() <= n) {
      pref.push_back(compose(skew_.fiber(orbit_next_[x]), pref.back()));
      orbit_next_[x] = skew_.base().apply(orbit_next_[x]);
      ++stored_;
    }
    return pref[n];
  }
  scratch_ = cocycle(skew_, x, n);  // over budget: recompute without caching
  return scratch_;
}

Rational rwm_functional(const SkewSystem& skew, const DenseFamily& fiber_family, std::size_t N,
                        std::int64_t j) {
  if (N < 1 || N > fiber_family.size()) throw ValidationError("N out of family range");
  if (j < 1) throw ValidationError("rwm horizon must be >= 1");
  const std::uint32_t m = skew.fiber_size();
  if (fiber_family.space_size() != m) throw SpaceMismatchError("family not on the fiber space");
  const std::uint32_t nb = skew.base_size();
  std::vector<std::int64_t> card(N);
  for (std::size_t i = 0; i < N; ++i)
    card[i] = static_cast<std::int64_t>(fiber_family.at(i + 1).cardinality());
  // Numerators of (m * |C A_i cap A_k| - |A_i| |A_k|)^2 summed over x, n.
  std::vector<BigInt> acc(N * N, BigInt(0));
  std::vector<std::uint32_t> composed(m);
  std::vector<std::uint32_t> next(m);
  for (std::uint32_t x = 0; x < nb; ++x) {
    for (std::uint32_t y = 0; y < m; ++y) composed[y] = y;
    std::uint32_t bx = x;
    for (std::int64_t n = 1; n <= j; ++n) {
      const auto& rf = skew.fiber(bx).forward();
      for (std::uint32_t y = 0; y < m; ++y) next[y] = rf[composed[y]];
      composed.swap(next);
      bx = skew.base().apply(bx);
      for (std::size_t i = 0; i < N; ++i) {
        const CellMask image = fiber_family.at(i + 1).mask().image(composed);
        for (std::size_t k = 0; k < N; ++k) {
          const std::int64_t cut =
              static_cast<std::int64_t>(image.and_count(fiber_family.at(k + 1).mask()));
          const std::int64_t diff = cut * m - card[i] * card[k];
          acc[i * N + k] += BigInt(diff) * diff;
        }
      }
    }
  }
  const BigInt denom = BigInt(m) * m * m * m * nb * j;
  Rational best = 0;
  for (const BigInt& a : acc) {
    Rational v(a, denom);
    if (v > best) best = v;
  }
  return best;
}

Rational rwm_trivial_value(const DenseFamily& fiber_family, std::size_t N) {
  if (N < 1 || N > fiber_family.size()) throw ValidationError("N out of family range");
  Rational best = 0;
  for (std::size_t i = 1; i <= N; ++i)
    for (std::size_t k = 1; k <= N; ++k) {
      const Rational diff = intersection_measure(fiber_family.at(i), fiber_family.at(k)) -
                            fiber_family.at(i).measure() * fiber_family.at(k).measure();
      const Rational sq = diff * diff;
      if (sq > best) best = sq;
    }
  return best;
}

Rational recurrence_functional(const SkewSystem& skew, const CellSet& base_set,
                               const std::vector<std::int64_t>& lags, std::size_t N,
                               const DenseFamily& fiber_family) {
  if (base_set.cardinality() == 0) throw ValidationError("recurrence set must have positive measure");
  if (base_set.space_size() != skew.base_size())
    throw SpaceMismatchError("recurrence set not on the base space");
  if (fiber_family.space_size() != skew.fiber_size())
    throw SpaceMismatchError("family not on the fiber space");
  if (lags.empty()) throw ValidationError("recurrence needs a nonempty lag set");
  if (N < 1) throw ValidationError("N must be >= 1");
  std::vector<std::int64_t> sorted(lags);
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1) throw ValidationError("recurrence lags must be positive");
  const std::int64_t max_p = sorted.back();
  const Rational threshold(1, static_cast<std::int64_t>(N));
  const CellAutomorphism fiber_id = CellAutomorphism::identity(skew.fiber_size());
  std::vector<std::uint64_t> hits(sorted.size(), 0);
  base_set.mask().for_each_set([&](std::size_t cell) {
    const std::uint32_t x = static_cast<std::uint32_t>(cell);
    CellAutomorphism acc = fiber_id;
    std::uint32_t bx = x;
    std::size_t li = 0;
    for (std::int64_t p = 1; p <= max_p && li < sorted.size(); ++p) {
      acc = compose(skew.fiber(bx), acc);
      bx = skew.base().apply(bx);
      while (li < sorted.size() && sorted[li] == p) {
        if (base_set.contains(bx) &&
            halmos_distance(acc, fiber_id, fiber_family).value < threshold)
          ++hits[li];
        ++li;
      }
    }
  });
  Rational product = 1;
  for (const std::uint64_t h : hits)
    product *= Rational(static_cast<std::int64_t>(h), skew.base_size());
  return product;
}

SliceProbe independent_factor_probe(const SkewSystem& skew, const CellSet& product_set,
                                    const std::vector<std::int64_t>& lags) {
  const std::uint32_t nb = skew.base_size();
  const std::uint32_t m = skew.fiber_size();
  if (product_set.space_size() != nb * m)
    throw SpaceMismatchError("probe set not on the product space");
  const auto slice_counts = [&](const CellMask& mask) {
    std::vector<std::uint64_t> counts(nb, 0);
    mask.for_each_set([&](std::size_t cell) { ++counts[cell / m]; });
    return counts;
  };
  const auto defect_of = [&](const std::vector<std::uint64_t>& counts, const Rational& mean) {
    Rational worst = 0;
    for (const std::uint64_t c : counts) {
      Rational d = Rational(static_cast<std::int64_t>(c), m) - mean;
      if (d < 0) d = -d;
      if (d > worst) worst = d;
    }
    return worst;
  };
  SliceProbe probe;
  probe.set_mass = product_set.measure();
  probe.constancy_defect = defect_of(slice_counts(product_set.mask()), probe.set_mass);
  for (const std::int64_t p : lags) {
    const CellSet shifted = apply_set(power(skew.product(), p), product_set);
    const CellMask both = product_set.mask() & shifted.mask();
    const Rational mean(static_cast<std::int64_t>(both.count()), std::int64_t{nb} * m);
    probe.lags.push_back({p, mean, defect_of(slice_counts(both), mean)});
  }
  return probe;
}

std::vector<CellAutomorphism> sample_fibers(const EnsembleSpec& spec, std::uint32_t trial) {
  if (trial >= spec.trials) throw ValidationError("trial index out of range");
  const std::uint32_t nb = static_cast<std::uint32_t>(spec.base.cell_count());
  SplitMix64 gen(derive_seed(spec.master_seed, trial));
  std::vector<CellAutomorphism> fibers;
  fibers.reserve(nb);
  for (std::uint32_t x = 0; x < nb; ++x) {
    if (spec.sampler == EnsembleSpec::Sampler::uniform_permutations) {
      std::vector<std::uint32_t> f(spec.fiber_n);
      for (std::uint32_t y = 0; y < spec.fiber_n; ++y) f[y] = y;
      for (std::uint32_t i = spec.fiber_n; i > 1; --i)
        std::swap(f[i - 1], f[static_cast<std::uint32_t>(gen.bounded(i))]);
      fibers.emplace_back(std::move(f));
    } else {
      std::vector<std::uint32_t> f(spec.fiber_n);
      for (std::uint32_t y = 0; y < spec.fiber_n; ++y) f[y] = y;
      for (std::uint32_t t = 0; t < spec.transpositions; ++t) {
        const std::uint32_t i = static_cast<std::uint32_t>(gen.bounded(spec.fiber_n));
        const std::uint32_t jj = static_cast<std::uint32_t>(gen.bounded(spec.fiber_n));
        std::swap(f[i], f[jj]);
      }
      fibers.emplace_back(std::move(f));
    }
  }
  return fibers;
}

SkewSystem sample_extension(const EnsembleSpec& spec, std::uint32_t trial) {
  return SkewSystem(make_system(spec.base), sample_fibers(spec, trial));
}

EnsembleReport lift_experiment(const EnsembleSpec& spec, LiftProperty property,
                               const LiftParams& params, unsigned threads) {
  if (spec.trials == 0) throw ValidationError("ensemble needs at least one trial");
  EnsembleReport report;
  report.master_seed = spec.master_seed;
  report.rows.resize(spec.trials);

  switch (property) {
    case LiftProperty::a_rigidity: {
      if (params.lags.empty()) throw ValidationError("a_rigidity needs scan lags");
      report.property = "a_rigidity";
      report.threshold_note = "witness: some scanned lag with psi_a < 1/N, N=" +
                              std::to_string(params.N);
      report.horizon_note = "lags scanned: " + std::to_string(params.lags.size());
      const Rational thr(1, static_cast<std::int64_t>(params.N));
      parallel_for(spec.trials, [&](std::size_t trial) {
        const SkewSystem skew = sample_extension(spec, static_cast<std::uint32_t>(trial));
        const DenseFamily fam =
            canonical_family(CellSpace(skew.product().space_size()), params.family_i_max);
        bool witness = false;
        Rational best;
        bool first = true;
        for (const std::int64_t lag : params.lags) {
          const Rational v = psi_partial(skew.product(), fam, params.a, params.N, lag);
          if (v < thr) witness = true;
          if (first || v < best) { best = v; first = false; }
        }
        report.rows[trial] = {static_cast<std::uint32_t>(trial), to_double(best), witness};
      }, threads);
      break;
    }
    case LiftProperty::weak_mixing_phi: {
      if (params.lags.empty()) throw ValidationError("weak_mixing_phi needs scan lags");
      report.property = "weak_mixing_phi";
      report.threshold_note = "witness: some scanned lag with phi < 1/N, N=" +
                              std::to_string(params.N);
      report.horizon_note = "lags scanned: " + std::to_string(params.lags.size());
      const Rational thr(1, static_cast<std::int64_t>(params.N));
      parallel_for(spec.trials, [&](std::size_t trial) {
        const SkewSystem skew = sample_extension(spec, static_cast<std::uint32_t>(trial));
        const DenseFamily fam =
            canonical_family(CellSpace(skew.product().space_size()), params.family_i_max);
        bool witness = false;
        Rational best;
        bool first = true;
        for (const std::int64_t lag : params.lags) {
          const Rational v = phi_mix(skew.product(), fam, params.N, lag);
          if (v < thr) witness = true;
          if (first || v < best) { best = v; first = false; }
        }
        report.rows[trial] = {static_cast<std::uint32_t>(trial), to_double(best), witness};
      }, threads);
      break;
    }
    case LiftProperty::rwm: {
      report.property = "rwm";
      const DenseFamily fiber_fam = canonical_family(CellSpace(spec.fiber_n), params.family_i_max);
      const Rational control = rwm_trivial_value(fiber_fam, params.N);
      report.control_value = to_double(control);
      report.threshold_note = "witness: value strictly below the S x Id control " +
                              control.str();
      report.horizon_note = "averaging horizon j=" + std::to_string(params.rwm_j);
      parallel_for(spec.trials, [&](std::size_t trial) {
        const SkewSystem skew = sample_extension(spec, static_cast<std::uint32_t>(trial));
        const Rational v = rwm_functional(skew, fiber_fam, params.N, params.rwm_j);
        report.rows[trial] = {static_cast<std::uint32_t>(trial), to_double(v), v < control};
      }, threads);
      break;
    }
    case LiftProperty::hp_blowup: {
      report.property = "hp_blowup";
      const std::uint64_t fiber_cells = SystemDescriptor{SystemKind::bernoulli_cyclic, 0, 2, 1,
                                                         params.bern_k, params.bern_window, 0}
                                            .cell_count();
      if (fiber_cells != spec.fiber_n)
        throw ValidationError("hp_blowup: fiber_n must equal alphabet^window");
      const CellAutomorphism base = make_system(spec.base);
      const CellAutomorphism bern = make_bernoulli_cyclic(params.bern_k, params.bern_window);
      const SkewSystem product =
          build_skew(base, std::vector<CellAutomorphism>(base.space_size(), bern));
      SystemDescriptor bd;
      bd.kind = SystemKind::bernoulli_cyclic;
      bd.alphabet = params.bern_k;
      bd.window = params.bern_window;
      const Partition xi = lift_fiber_partition(base.space_size(), coordinate_partition(bd, 0));
      const double half_entropy = partition_entropy(xi) / 2.0;
      report.control_value = half_entropy;
      report.threshold_note = "witness: h_j > H(xi)/2 = " + std::to_string(half_entropy);
      report.horizon_note = "j=" + std::to_string(params.hp_j) + ", progression length " +
                            std::to_string(params.hp_length);
      std::vector<std::int64_t> lags;
      for (std::uint32_t mlt = 1; mlt <= params.hp_length; ++mlt)
        lags.push_back(static_cast<std::int64_t>(mlt) * params.hp_j);
      const CellAutomorphism base_id = CellAutomorphism::identity(base.space_size());
      parallel_for(spec.trials, [&](std::size_t trial) {
        const SkewSystem j_sys =
            SkewSystem(base_id, sample_fibers(spec, static_cast<std::uint32_t>(trial)));
        const SkewSystem conj = conjugate(product, j_sys);
        const double hj = sequence_entropy_term(conj.product(), xi, lags);
        report.rows[trial] = {static_cast<std::uint32_t>(trial), hj, hj > half_entropy};
      }, threads);
      break;
    }
  }
  std::size_t witnesses = 0;
  for (const auto& row : report.rows) witnesses += row.witness ? 1 : 0;
  report.observed_fraction = static_cast<double>(witnesses) / spec.trials;
  return report;
}

FamilyProfileReport family_profile(const SkewSystem& family, const Partition& blocks,
                                   const std::vector<AdmissibleFunction>& candidates,
                                   const std::vector<std::int64_t>& lag_list,
                                   const std::vector<CellFunction>& tests, std::size_t N) {
  if (!family.over_identity()) throw ValidationError("family_profile needs a skew over Id");
  if (blocks.n != family.base_size()) throw SpaceMismatchError("blocks not on the base space");
  if (candidates.empty() || lag_list.empty()) throw ValidationError("need candidates and lags");
  FamilyProfileReport report;
  for (std::uint32_t b = 0; b < blocks.class_count; ++b) {
    std::vector<std::uint32_t> members;
    for (std::uint32_t x = 0; x < blocks.n; ++x)
      if (blocks.labels[x] == static_cast<std::int32_t>(b)) members.push_back(x);
    FamilyProfileReport::BlockRow row;
    row.block = static_cast<std::int32_t>(b);
    row.candidate_distance.resize(candidates.size(), 0.0);
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      double worst_lag = 0.0;
      for (const std::int64_t lag : lag_list) {
        double mean = 0.0;
        for (const std::uint32_t x : members)
          mean += weak_limit_distance(family.fiber(x), lag, candidates[ci], tests, N);
        mean /= static_cast<double>(members.size());
        worst_lag = std::max(worst_lag, mean);
      }
      row.candidate_distance[ci] = worst_lag;
    }
    row.best_candidate = 0;
    for (std::size_t ci = 1; ci < candidates.size(); ++ci)
      if (row.candidate_distance[ci] < row.candidate_distance[row.best_candidate])
        row.best_candidate = ci;
    double runner_up = std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < candidates.size(); ++ci)
      if (ci != row.best_candidate)
        runner_up = std::min(runner_up, row.candidate_distance[ci]);
    row.margin = candidates.size() > 1 ? runner_up - row.candidate_distance[row.best_candidate] : 0.0;
    report.blocks.push_back(std::move(row));
  }
  return report;
}

}  // namespace ergolab
