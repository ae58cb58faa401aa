#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>

#include "ergolab/rng.hpp"
#include "ergolab/spectral.hpp"
#include "ergolab/systems.hpp"

using namespace ergolab;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Complex> random_unit_vector(std::uint32_t n, std::uint64_t seed) {
  SplitMix64 gen(seed);
  std::vector<Complex> f(n);
  for (auto& z : f) z = Complex{gen.uniform01() * 2 - 1, gen.uniform01() * 2 - 1};
  return normalized_complex(f, n);
}

// Riemann-grid quadrature oracle over the circle in angle-of-turn units.
double quad_circle(const std::function<double(double)>& f, int grid = 200000) {
  double acc = 0.0;
  for (int i = 0; i < grid; ++i) acc += f((i + 0.5) / grid);
  return acc / grid;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("correlation sequences of systems") {
  SUBCASE("identity pins every coefficient at 1") {
    const CellAutomorphism id = make_identity(6);
    const auto corr = correlation_sequence(id, random_unit_vector(6, 1), 10);
    for (std::int64_t s = -10; s <= 10; ++s) CHECK(std::abs(corr.at(s) - Complex{1, 0}) < 1e-12);
  }
  SUBCASE("rotation character vector gives a pure phase") {
    const CellAutomorphism rot = make_cyclic_rotation(4);
    std::vector<Complex> f(4);
    for (std::uint32_t c = 0; c < 4; ++c)
      f[c] = Complex{std::cos(kPi * c / 2), std::sin(kPi * c / 2)};  // i^c, unit modulus
    const auto corr = correlation_sequence(rot, f, 12);
    const AtomicSpectrum spec = atomic_spectrum(rot, f);
    REQUIRE(spec.atoms.size() == 1);
    CHECK(spec.atoms[0].angle_den == 4);
    for (std::int64_t s = -12; s <= 12; ++s) {
      const double phase = -2.0 * kPi * s / 4;  // e^{-2 pi i s / 4} pattern
      CHECK(std::abs(corr.at(s) - Complex{std::cos(phase), std::sin(phase)}) < 1e-12);
      CHECK(std::abs(corr.at(s) - spec.reconstruct(s)) < 1e-12);
    }
  }
  SUBCASE("tensor vectors factorize over direct products") {
    const CellAutomorphism s = make_random_automorphism(6, 3);
    const CellAutomorphism t = make_random_automorphism(5, 4);
    const auto f = random_unit_vector(6, 5);
    const auto g = random_unit_vector(5, 6);
    std::vector<Complex> fg(30);
    for (std::uint32_t x = 0; x < 6; ++x)
      for (std::uint32_t y = 0; y < 5; ++y) fg[x * 5 + y] = f[x] * g[y];
    const auto corr_prod = correlation_sequence(direct_product(s, t), fg, 16);
    const auto expected = CorrelationSequence::product(
        correlation_sequence(s, f, 16), correlation_sequence(t, g, 16), "check");
    for (std::int64_t lag = -16; lag <= 16; ++lag)
      CHECK(std::abs(corr_prod.at(lag) - expected.at(lag)) < 1e-10);
  }
  SUBCASE("non-normalized vectors are rejected") {
    const CellAutomorphism id = make_identity(4);
    CHECK_THROWS_AS(correlation_sequence(id, std::vector<Complex>(4, Complex{2, 0}), 3),
                    ValidationError);
  }
}

TEST_CASE("correlation sequence validation") {
  SUBCASE("Hermitian symmetry is enforced") {
    std::vector<Complex> v(5, Complex{0, 0});
    v[2] = 1.0;
    v[3] = Complex{0.1, 0.1};
    v[1] = Complex{0.1, 0.1};  // should be the conjugate
    CHECK_THROWS_AS(CorrelationSequence(2, v, "bad"), ValidationError);
  }
  SUBCASE("positive semidefiniteness is spot checked") {
    std::vector<Complex> v(5, Complex{0, 0});
    v[2] = 1.0;
    v[1] = v[3] = 1.2;  // |sigma_hat(1)| > sigma_hat(0) breaks PSD
    CHECK_THROWS_AS(CorrelationSequence(2, v, "bad"), ValidationError);
  }
  SUBCASE("min-eigenvalue helper on known matrices") {
    std::vector<Complex> ones(64, Complex{1, 0});
    CHECK(hermitian_min_eigenvalue(ones, 8) == doctest::Approx(0.0).epsilon(1e-10));
    std::vector<Complex> eye(64, Complex{0, 0});
    for (int i = 0; i < 8; ++i) eye[i * 8 + i] = 1.0;
    CHECK(hermitian_min_eigenvalue(eye, 8) == doctest::Approx(1.0));
    // Hermitian with a known negative eigenvalue: [[0, i], [-i, 0]] has +-1.
    std::vector<Complex> pauli{{0, 0}, {0, 1}, {0, -1}, {0, 0}};
    CHECK(hermitian_min_eigenvalue(pauli, 2) == doctest::Approx(-1.0));
  }
}

TEST_CASE("atomic spectra of permutation operators") {
  SUBCASE("identity concentrates at angle zero") {
    const CellAutomorphism id = make_identity(9);
    const auto f = random_unit_vector(9, 7);
    const AtomicSpectrum spec = atomic_spectrum(id, f);
    REQUIRE(spec.atoms.size() == 1);
    CHECK(spec.atoms[0].angle_num == 0);
    CHECK(spec.atoms[0].mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("two-cell swap splits the indicator evenly") {
    const CellAutomorphism rot = make_cyclic_rotation(2);
    const std::vector<Complex> f{std::sqrt(2.0), 0.0};
    const AtomicSpectrum spec = atomic_spectrum(rot, f);
    REQUIRE(spec.atoms.size() == 2);
    CHECK(spec.atoms[0].angle_num == 0);
    CHECK(spec.atoms[0].mass == doctest::Approx(0.5));
    CHECK(spec.atoms[1].angle_num == 1);
    CHECK(spec.atoms[1].angle_den == 2);
    CHECK(spec.atoms[1].mass == doctest::Approx(0.5));
  }
  SUBCASE("total mass and reconstruction on seeded systems") {
    const CellAutomorphism t = make_random_automorphism(12, 3);
    const auto f = random_unit_vector(12, 8);
    const AtomicSpectrum spec = atomic_spectrum(t, f);
    CHECK(spec.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
    const auto corr = correlation_sequence(t, f, 24);
    for (std::int64_t s = -24; s <= 24; ++s)
      CHECK(std::abs(spec.reconstruct(s) - corr.at(s)) < 1e-9);
  }
  SUBCASE("reconstruction invariant on a batch of random systems") {
    SplitMix64 gen(61);
    for (int trial = 0; trial < 25; ++trial) {
      const std::uint32_t n = 4 + static_cast<std::uint32_t>(gen.bounded(124));
      const CellAutomorphism t = make_random_automorphism(n, gen.next());
      const auto f = random_unit_vector(n, gen.next());
      const AtomicSpectrum spec = atomic_spectrum(t, f);
      const auto corr = correlation_sequence(t, f, 32);
      CHECK(spec.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
      for (const std::int64_t s : {1, 5, 17, 32})
        CHECK(std::abs(spec.reconstruct(s) - corr.at(s)) < 1e-9);
    }
  }
}

TEST_CASE("trapezoid profile") {
  SUBCASE("plateau, support, and boundary values") {
    CHECK(trapezoid_value(3, 16, (3 + 0.5) / 16.0) == 1.0);          // plateau midpoint
    CHECK(trapezoid_value(3, 16, (5 + 0.5) / 16.0) == 0.0);          // two arcs away
    CHECK(trapezoid_value(3, 16, 3.0 / 16.0) == 1.0);                // plateau left edge
    CHECK(trapezoid_value(3, 16, 2.0 / 16.0) == 0.0);                // ramp start
    CHECK(trapezoid_value(3, 16, 2.5 / 16.0) == doctest::Approx(0.5));
    CHECK(trapezoid_value(0, 8, 7.99 / 8.0) == doctest::Approx(0.99));  // ramp wraps around
    CHECK_THROWS_AS(trapezoid_value(0, 2, 0.1), ValidationError);
  }
  SUBCASE("mean over the circle is 2/P") {
    for (const std::uint32_t p : {4u, 7u, 16u}) {
      const double mean = quad_circle([&](double t) { return trapezoid_value(2 % p, p, t); });
      CHECK(mean == doctest::Approx(2.0 / p).epsilon(1e-6));
    }
  }
  SUBCASE("Fourier coefficients match quadrature including the phase") {
    const std::uint32_t p = 8, k = 3;
    for (const std::int64_t s : {0, 1, 2, 5, 9}) {
      const double re = quad_circle(
          [&](double t) { return trapezoid_value(k, p, t) * std::cos(-2 * kPi * s * t); });
      const double im = quad_circle(
          [&](double t) { return trapezoid_value(k, p, t) * std::sin(-2 * kPi * s * t); });
      const double phase = -2.0 * kPi * s * (k + 0.5) / p;
      const Complex expected =
          trapezoid_coefficient(p, s) * Complex{std::cos(phase), std::sin(phase)};
      CHECK(re == doctest::Approx(expected.real()).epsilon(1e-5));
      CHECK(im == doctest::Approx(expected.imag()).epsilon(1e-5));
    }
  }
}

TEST_CASE("delta integrals with certified enclosures") {
  SUBCASE("lebesgue: exact 2/P with zero bound at any degree") {
    const auto corr = CorrelationSequence::lebesgue(64, TailMode::assume_zero);
    for (const std::int64_t d : {0, 5, 64}) {
      const DeltaIntegral di = delta_integral(corr, 3, 8, d);
      CHECK(di.value == doctest::Approx(2.0 / 8).epsilon(1e-13));
      CHECK(di.bound <= 1e-13);
    }
  }
  SUBCASE("dirac: approaches the trapezoid value at the atom") {
    const auto corr = CorrelationSequence::dirac_at_zero(1 << 14, TailMode::worst_case);
    for (const std::uint32_t k : {0u, 15u}) {
      const DeltaIntegral di = delta_integral(corr, k, 16, 1 << 14);
      CHECK(std::abs(di.value - 1.0) < 0.01);
    }
    const DeltaIntegral far = delta_integral(corr, 8, 16, 1 << 14);
    CHECK(std::abs(far.value) < 0.01);
    CHECK(far.upper >= 0.0);
  }
  SUBCASE("single-arc evaluation agrees with the batch") {
    const auto corr = CorrelationSequence::blend(
        CorrelationSequence::dirac_at_zero(4096, TailMode::worst_case),
        CorrelationSequence::lebesgue(4096, TailMode::worst_case), 0.3, "blend");
    const auto batch = arc_integrals(corr, 12, 2048);
    for (std::uint32_t k = 0; k < 12; ++k) {
      const DeltaIntegral di = delta_integral(corr, k, 12, 2048);
      CHECK(di.value == doctest::Approx(batch[k].value).epsilon(1e-12));
      CHECK(di.bound == doctest::Approx(batch[k].bound).epsilon(1e-12));
    }
  }
  SUBCASE("atomic cross-check on the 8-rotation") {
    const CellAutomorphism rot = make_cyclic_rotation(8);
    const auto f = random_unit_vector(8, 11);
    const auto corr = correlation_sequence(rot, f, 1 << 15);
    const AtomicSpectrum spec = atomic_spectrum(rot, f);
    for (std::uint32_t k = 0; k < 16; ++k) {
      const DeltaIntegral di = delta_integral(corr, k, 16, 1 << 15);
      CHECK(std::abs(spec.integrate_trapezoid(k, 16) - di.value) <= di.bound + 1e-9);
    }
  }
  SUBCASE("degree beyond the horizon is rejected") {
    const auto corr = CorrelationSequence::lebesgue(32, TailMode::assume_zero);
    CHECK_THROWS_AS(delta_integral(corr, 0, 8, 64), ValidationError);
  }
  SUBCASE("the certified enclosure contains the true atomic integral") {
    SplitMix64 gen(101);
    for (int trial = 0; trial < 20; ++trial) {
      const std::uint32_t n = 4 + static_cast<std::uint32_t>(gen.bounded(60));
      const CellAutomorphism t = make_random_automorphism(n, gen.next());
      const auto f = random_unit_vector(n, gen.next());
      const std::int64_t s_max = 256 << gen.bounded(4);
      const auto corr = correlation_sequence(t, f, s_max);
      const AtomicSpectrum spec = atomic_spectrum(t, f);
      const std::uint32_t p = 5 + static_cast<std::uint32_t>(gen.bounded(28));
      const auto arcs = arc_integrals(corr, p, s_max);
      for (std::uint32_t k = 0; k < p; ++k) {
        const double exact = spec.integrate_trapezoid(k, p);
        CHECK(arcs[k].lower - 1e-9 <= exact);
        CHECK(exact <= arcs[k].upper + 1e-9);
      }
    }
  }
}

TEST_CASE("arc counting") {
  SUBCASE("lebesgue counts zero arcs, certified") {
    const auto corr = CorrelationSequence::lebesgue(1 << 12, TailMode::assume_zero);
    for (const std::uint32_t p : {8u, 64u}) {
      const DCountResult r = d_count(corr, 2, p, 1 << 12);
      CHECK(r.count == 0);
      CHECK(r.certified);
      CHECK(r.certified_out == p);
    }
  }
  SUBCASE("dirac at N=2, P=16 counts 14 arcs") {
    const auto corr = CorrelationSequence::dirac_at_zero(1 << 18, TailMode::worst_case);
    const DCountResult r = d_count(corr, 2, 16, 1 << 18);
    CHECK(r.count == 14);
    CHECK(r.certified);
  }
  SUBCASE("four atoms on arc boundaries leave at least 56 of 64 arcs empty") {
    const CellAutomorphism rot = make_cyclic_rotation(4);
    const auto f = random_unit_vector(4, 13);
    const auto corr = correlation_sequence(rot, f, 1 << 18);
    const DCountResult r = d_count(corr, 8, 64, 1 << 18);
    CHECK(r.count >= 56);
  }
}

TEST_CASE("singularity classifier") {
  const std::int64_t s_max = 1 << 16;
  SUBCASE("dirac is witnessed and witnesses persist under larger schedules") {
    const auto corr = CorrelationSequence::dirac_at_zero(s_max, TailMode::worst_case);
    const auto small = classify_singular(corr, {2, 4}, {8, 16, 32, 64});
    CHECK(small.verdict == SingularityVerdict::Kind::singular_witnessed);
    CHECK(small.witness.has_value());
    const auto large = classify_singular(corr, {2, 4}, {8, 16, 32, 64, 128, 256});
    CHECK(large.verdict == SingularityVerdict::Kind::singular_witnessed);
    ClassifyPolicy lighter;
    lighter.degree_multiplier = 256;
    const auto deeper = classify_singular(corr, {2, 4}, {8, 16, 32, 64}, lighter);
    CHECK(deeper.verdict == SingularityVerdict::Kind::singular_witnessed);
  }
  SUBCASE("lebesgue certifies failure at N=2") {
    const auto corr = CorrelationSequence::lebesgue(s_max, TailMode::assume_zero);
    const auto verdict = classify_singular(corr, {2}, {8, 16, 64, 256, 1024});
    CHECK(verdict.verdict == SingularityVerdict::Kind::not_singular_at_horizon);
    CHECK_FALSE(verdict.witness.has_value());
  }
  SUBCASE("half-and-half mixture is blocked by the Lebesgue floor") {
    const auto corr = CorrelationSequence::blend(
        CorrelationSequence::dirac_at_zero(s_max, TailMode::assume_zero),
        CorrelationSequence::lebesgue(s_max, TailMode::assume_zero), 0.5, "mixture");
    const auto verdict = classify_singular(corr, {2, 4}, {8, 16, 64, 256});
    CHECK(verdict.verdict == SingularityVerdict::Kind::not_singular_at_horizon);
  }
  SUBCASE("finite systems are witnessed with generous schedules") {
    const CellAutomorphism rot = make_cyclic_rotation(4);
    const auto f = random_unit_vector(4, 17);
    const auto corr = correlation_sequence(rot, f, 1 << 18);
    const auto verdict = classify_singular(corr, {2, 4, 8}, {16, 32, 64, 128});
    CHECK(verdict.verdict == SingularityVerdict::Kind::singular_witnessed);
  }
  SUBCASE("schedules must be nonempty") {
    const auto corr = CorrelationSequence::lebesgue(64, TailMode::assume_zero);
    CHECK_THROWS_AS(classify_singular(corr, {}, {8}), ValidationError);
  }
  SUBCASE("short horizons with worst-case tails stay inconclusive") {
    // The tail allowance 2P/(pi^2 s_max) swamps the 1/(NP) threshold here, so
    // no arc can be certified either way.
    const auto corr = CorrelationSequence::lebesgue(64, TailMode::worst_case);
    const auto verdict = classify_singular(corr, {2}, {32});
    CHECK(verdict.verdict == SingularityVerdict::Kind::inconclusive);
    CHECK_FALSE(verdict.witness.has_value());
    REQUIRE(verdict.rows.size() == 1);
    CHECK(verdict.rows[0].counts.uncertified == 32);
  }
}

TEST_CASE("correlation csv round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ergolab_spectral_test";
  fs::create_directories(dir);
  const std::string path = (dir / "corr.csv").string();
  const auto corr = CorrelationSequence::blend(
      CorrelationSequence::dirac_at_zero(48, TailMode::assume_zero),
      CorrelationSequence::lebesgue(48, TailMode::assume_zero), 0.25, "mixture");
  save_correlation_csv(corr, path);
  const auto loaded = load_correlation_csv(path, TailMode::assume_zero);
  REQUIRE(loaded.s_max() == 48);
  for (std::int64_t s = -48; s <= 48; ++s) CHECK(std::abs(loaded.at(s) - corr.at(s)) < 1e-15);
  SUBCASE("missing lag is reported") {
    const std::string bad = (dir / "bad.csv").string();
    std::FILE* fp = std::fopen(bad.c_str(), "w");
    std::fputs("s,re,im\n0,1,0\n2,0.5,0\n-2,0.5,0\n", fp);
    std::fclose(fp);
    CHECK_THROWS_AS(load_correlation_csv(bad, TailMode::worst_case), ValidationError);
  }
  SUBCASE("malformed numbers are reported with the line") {
    const std::string bad = (dir / "bad2.csv").string();
    std::FILE* fp = std::fopen(bad.c_str(), "w");
    std::fputs("s,re,im\n0,one,0\n", fp);
    std::fclose(fp);
    CHECK_THROWS_AS(load_correlation_csv(bad, TailMode::worst_case), ValidationError);
  }
  fs::remove_all(dir);
}

}  // TEST_SUITE
