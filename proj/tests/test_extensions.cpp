#include <doctest.h>

#include <cmath>

#include "ergolab/extensions.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/seqentropy.hpp"
#include "ergolab/systems.hpp"

using namespace ergolab;

namespace {

EnsembleSpec small_spec(const char* base, std::uint32_t fiber_n, std::uint32_t trials,
                        std::uint64_t seed) {
  EnsembleSpec spec;
  spec.base = SystemDescriptor::parse(base);
  spec.fiber_n = fiber_n;
  spec.trials = trials;
  spec.master_seed = seed;
  return spec;
}

}  // namespace

TEST_SUITE("extensions") {

TEST_CASE("cocycle composition") {
  const CellAutomorphism base = make_cyclic_rotation(6);
  const CellAutomorphism u = make_random_automorphism(5, 2);
  SUBCASE("constant fiber family gives powers") {
    const SkewSystem skew = build_skew(base, std::vector<CellAutomorphism>(6, u));
    for (std::int64_t n = 0; n <= 10; ++n) CHECK(cocycle(skew, 2, n) == power(u, n));
  }
  SUBCASE("n = 0 and n = 1") {
    const SkewSystem skew = sample_extension(small_spec("cyclic_rotation(6)", 5, 1, 3), 0);
    CHECK(cocycle(skew, 4, 0) == CellAutomorphism::identity(5));
    CHECK(cocycle(skew, 4, 1) == skew.fiber(4));
  }
  SUBCASE("cocycle law, cached and uncached") {
    const SkewSystem skew = sample_extension(small_spec("random_permutation(8,5)", 6, 1, 9), 0);
    CocycleCache cache(skew, 1 << 12);
    CocycleCache tiny(skew, 4);  // forces the recompute path
    for (std::uint32_t x = 0; x < 8; ++x)
      for (std::uint32_t n = 0; n <= 12; ++n)
        for (std::uint32_t m = 0; m <= 12; m += 3) {
          const std::uint32_t sx = power(skew.base(), n).apply(x);
          const CellAutomorphism expected = compose(cocycle(skew, sx, m), cocycle(skew, x, n));
          CHECK(cache.at(x, n + m) == expected);
          CHECK(tiny.at(x, n + m) == expected);
        }
  }
  SUBCASE("negative steps are rejected") {
    const SkewSystem skew = trivial_extension(base, 3);
    CHECK_THROWS_AS(cocycle(skew, 0, -1), ValidationError);
  }
}

TEST_CASE("rwm functional") {
  const DenseFamily fam = canonical_family(CellSpace(8), 4);
  const CellAutomorphism base = make_cyclic_rotation(8);
  SUBCASE("trivial extension matches the closed form, independent of j") {
    const SkewSystem trivial = trivial_extension(base, 8);
    const Rational closed = rwm_trivial_value(fam, 2);
    CHECK(closed == Rational(1, 16));  // (mu(A_2 cap A_2) - mu^2)^2 = (1/2 - 1/4)^2
    CHECK(rwm_functional(trivial, fam, 2, 3) == closed);
    CHECK(rwm_functional(trivial, fam, 2, 17) == closed);
  }
  SUBCASE("the full-space family alone scores zero") {
    const DenseFamily full_only(std::vector<CellSet>{CellSet::full(CellSpace(8))});
    const SkewSystem skew = sample_extension(small_spec("cyclic_rotation(8)", 8, 1, 11), 0);
    CHECK(rwm_functional(skew, full_only, 1, 16) == 0);
  }
  SUBCASE("random extensions fall below the trivial control") {
    const Rational control = rwm_trivial_value(fam, 2);
    std::size_t below = 0;
    for (std::uint32_t trial = 0; trial < 10; ++trial) {
      const SkewSystem skew =
          sample_extension(small_spec("cyclic_rotation(8)", 8, 10, 20240802), trial);
      if (rwm_functional(skew, fam, 2, 64) < control) ++below;
    }
    CHECK(below >= 9);
  }
}

TEST_CASE("recurrence functional") {
  const CellAutomorphism base = make_cyclic_rotation(16);
  const DenseFamily fiber_fam = canonical_family(CellSpace(8), 8);
  const CellSet a = canonical_family(CellSpace(16), 4).at(2);  // lower half
  SUBCASE("trivial extension reduces to the intersection product") {
    const SkewSystem trivial = trivial_extension(base, 8);
    const std::vector<std::int64_t> lags{1, 3, 7};
    Rational expected = 1;
    for (const std::int64_t p : lags)
      expected *= intersection_measure(a, apply_set(power(base, p), a));
    CHECK(recurrence_functional(trivial, a, lags, 4, fiber_fam) == expected);
  }
  SUBCASE("an empty return kills the product") {
    const CellAutomorphism rot8 = make_cyclic_rotation(8);
    const SkewSystem trivial = trivial_extension(rot8, 4);
    const CellSet single(CellSpace(8), std::vector<std::uint32_t>{0});
    const DenseFamily ff = canonical_family(CellSpace(4), 4);
    CHECK(recurrence_functional(trivial, single, {1}, 2, ff) == 0);
  }
  SUBCASE("antitone in N and in extra lags") {
    for (std::uint32_t trial = 0; trial < 8; ++trial) {
      const SkewSystem skew =
          sample_extension(small_spec("cyclic_rotation(16)", 6, 8, 301), trial);
      const DenseFamily ff = canonical_family(CellSpace(6), 6);
      const Rational loose = recurrence_functional(skew, a, {2, 4}, 2, ff);
      const Rational tight_n = recurrence_functional(skew, a, {2, 4}, 8, ff);
      const Rational more_lags = recurrence_functional(skew, a, {2, 4, 6}, 2, ff);
      CHECK(tight_n <= loose);
      CHECK(more_lags <= loose);
    }
  }
  SUBCASE("block-constant J keeps the conjugated cocycle near the identity") {
    // J is constant on each half of the base, so C(x, p) = Id whenever x and
    // S^p x share a block; points of A returning within the block witness a
    // positive functional.
    const CellAutomorphism u = make_random_automorphism(8, 33);
    std::vector<CellAutomorphism> q_fibers;
    for (std::uint32_t x = 0; x < 16; ++x)
      q_fibers.push_back(x < 8 ? u : CellAutomorphism::identity(8));
    const SkewSystem j_sys(CellAutomorphism::identity(16), std::move(q_fibers));
    const SkewSystem conj = conjugate(trivial_extension(base, 8), j_sys);
    const CellSet low(CellSpace(16), std::vector<std::uint32_t>{0, 1, 2, 3});
    const Rational value = recurrence_functional(conj, low, {1, 2}, 4, fiber_fam);
    CHECK(value > 0);
  }
  SUBCASE("validation") {
    const SkewSystem trivial = trivial_extension(base, 8);
    const CellSet empty(CellSpace(16), std::vector<std::uint32_t>{});
    CHECK_THROWS_AS(recurrence_functional(trivial, empty, {1}, 2, fiber_fam), ValidationError);
    CHECK_THROWS_AS(recurrence_functional(trivial, a, {}, 2, fiber_fam), ValidationError);
    CHECK_THROWS_AS(recurrence_functional(trivial, a, {0}, 2, fiber_fam), ValidationError);
  }
}

TEST_CASE("independent factor probe") {
  const SkewSystem skew = sample_extension(small_spec("cyclic_rotation(16)", 16, 1, 41), 0);
  const CellSpace product_space(256);
  SUBCASE("base slabs have indicator slices") {
    CellMask m(256);
    for (std::uint32_t y = 0; y < 16; ++y) m.set(3 * 16 + y);  // {3} x Y
    const SliceProbe probe = independent_factor_probe(skew, CellSet(product_space, m), {1});
    CHECK(probe.set_mass == Rational(1, 16));
    CHECK(probe.constancy_defect == Rational(15, 16));  // |1 - 1/16| on the slab
  }
  SUBCASE("fiber slabs are exactly constant") {
    CellMask m(256);
    for (std::uint32_t x = 0; x < 16; ++x)
      for (std::uint32_t y = 0; y < 4; ++y) m.set(x * 16 + y);  // X x B, mu(B) = 1/4
    const SliceProbe probe = independent_factor_probe(skew, CellSet(product_space, m), {1, 2});
    CHECK(probe.set_mass == Rational(1, 4));
    CHECK(probe.constancy_defect == 0);
  }
  SUBCASE("random set defects match an index-loop oracle") {
    SplitMix64 gen(97);
    CellMask m(256);
    for (std::uint32_t c = 0; c < 256; ++c)
      if (gen.bounded(2)) m.set(c);
    const CellSet e(product_space, m);
    const SliceProbe probe = independent_factor_probe(skew, e, {3});
    const CellSet shifted = apply_set(power(skew.product(), 3), e);
    Rational worst = 0;
    const Rational mean = intersection_measure(e, shifted);
    for (std::uint32_t x = 0; x < 16; ++x) {
      std::int64_t count = 0;
      for (std::uint32_t y = 0; y < 16; ++y) {
        const std::uint32_t cell = x * 16 + y;
        if (e.contains(cell) && shifted.contains(cell)) ++count;
      }
      Rational d = Rational(count, 16) - mean;
      if (d < 0) d = -d;
      if (d > worst) worst = d;
    }
    CHECK(probe.lags[0].defect == worst);
    CHECK(probe.lags[0].mean == mean);
  }
}

TEST_CASE("extension sampling") {
  SUBCASE("zero transpositions give the trivial extension") {
    EnsembleSpec spec = small_spec("cyclic_rotation(6)", 5, 3, 7);
    spec.sampler = EnsembleSpec::Sampler::near_identity;
    spec.transpositions = 0;
    const SkewSystem skew = sample_extension(spec, 1);
    CHECK(skew.product() == trivial_extension(make_cyclic_rotation(6), 5).product());
  }
  SUBCASE("same spec and trial reproduce bit-identically") {
    const EnsembleSpec spec = small_spec("odometer(2,3)", 6, 4, 99);
    CHECK(sample_extension(spec, 2).product() == sample_extension(spec, 2).product());
    CHECK_FALSE(sample_extension(spec, 2).product() == sample_extension(spec, 3).product());
    CHECK_THROWS_AS(sample_extension(spec, 4), ValidationError);
  }
  SUBCASE("uniform sampler image frequencies pass a 5-sigma smoke test") {
    EnsembleSpec spec = small_spec("identity(1)", 6, 10000, 1234);
    std::vector<std::uint64_t> counts(6, 0);
    for (std::uint32_t trial = 0; trial < spec.trials; ++trial)
      ++counts[sample_fibers(spec, trial)[0].apply(0)];
    const double expected = 10000.0 / 6;
    const double sigma = std::sqrt(10000.0 * (1.0 / 6) * (5.0 / 6));
    for (const auto c : counts)
      CHECK(std::abs(static_cast<double>(c) - expected) < 5 * sigma);
  }
}

TEST_CASE("lift experiments") {
  SUBCASE("trivial extensions witness partial rigidity at period lags") {
    EnsembleSpec spec = small_spec("cyclic_rotation(6)", 4, 8, 55);
    spec.sampler = EnsembleSpec::Sampler::near_identity;
    spec.transpositions = 0;
    LiftParams params;
    params.N = 4;
    params.a = Rational(1, 2);
    params.lags = {6, 12};
    params.family_i_max = 6;
    const EnsembleReport report = lift_experiment(spec, LiftProperty::a_rigidity, params);
    CHECK(report.observed_fraction == 1.0);
  }
  SUBCASE("rwm control trials never beat the control") {
    EnsembleSpec spec = small_spec("cyclic_rotation(8)", 8, 6, 60);
    spec.sampler = EnsembleSpec::Sampler::near_identity;
    spec.transpositions = 0;
    LiftParams params;
    params.N = 2;
    params.rwm_j = 16;
    params.family_i_max = 4;
    const EnsembleReport report = lift_experiment(spec, LiftProperty::rwm, params);
    CHECK(report.observed_fraction == 0.0);  // equality, never strictly below
  }
  SUBCASE("report rows stay ordered by trial index") {
    EnsembleSpec spec = small_spec("cyclic_rotation(8)", 6, 12, 61);
    LiftParams params;
    params.N = 2;
    params.rwm_j = 8;
    params.family_i_max = 4;
    const EnsembleReport a = lift_experiment(spec, LiftProperty::rwm, params, 1);
    const EnsembleReport b = lift_experiment(spec, LiftProperty::rwm, params, 3);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].trial == i);
      CHECK(a.rows[i].value == b.rows[i].value);
    }
  }
}

TEST_CASE("family profile") {
  const std::uint32_t m = 6;
  const CellAutomorphism rot6 = make_cyclic_rotation(m);
  std::vector<CellFunction> tests;
  const DenseFamily fam = canonical_family(CellSpace(m), 4);
  for (std::size_t i = 1; i <= fam.size(); ++i) tests.push_back(CellFunction::indicator(fam.at(i)));
  const std::vector<AdmissibleFunction> candidates{AdmissibleFunction::identity_poly(),
                                                   AdmissibleFunction::pure_theta()};
  SUBCASE("blocks of rotations fit the identity at period lags") {
    std::vector<CellAutomorphism> fibers;
    for (std::uint32_t x = 0; x < 12; ++x) fibers.push_back(x < 6 ? rot6 : power(rot6, 2));
    const SkewSystem family(CellAutomorphism::identity(12), std::move(fibers));
    const Partition blocks = block_partition(CellSpace(12), 2);
    const auto report = family_profile(family, blocks, candidates, {6, 12}, tests, 2);
    REQUIRE(report.blocks.size() == 2);
    for (const auto& row : report.blocks) {
      CHECK(row.best_candidate == 0);
      CHECK(row.candidate_distance[0] == 0.0);
      CHECK(row.margin > 0.0);
    }
  }
  SUBCASE("word-shift fibers fit the mean projection at disjoint windows") {
    const CellAutomorphism bern = make_bernoulli_cyclic(2, 8);
    const SkewSystem family(CellAutomorphism::identity(4),
                            std::vector<CellAutomorphism>(4, bern));
    const Partition blocks = block_partition(CellSpace(4), 1);
    const DenseFamily word_fam = single_coordinate_family(2, 8, 2);
    std::vector<CellFunction> word_tests;
    for (std::size_t i = 1; i <= 2; ++i)
      word_tests.push_back(CellFunction::indicator(word_fam.at(i)));
    const auto report = family_profile(family, blocks,
                                       {AdmissibleFunction::pure_theta()}, {4}, word_tests, 2);
    CHECK(report.blocks[0].candidate_distance[0] == 0.0);
  }
  SUBCASE("profiles require a family over the identity") {
    const SkewSystem skewed = trivial_extension(rot6, 4);
    CHECK_THROWS_AS(family_profile(skewed, block_partition(CellSpace(m), 2), candidates, {1},
                                   tests, 2),
                    ValidationError);
  }
}

}  // TEST_SUITE
