#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergolab/cellsys.hpp"

namespace ergolab {

using Complex = std::complex<double>;

// What a correlation sequence asserts about coefficients beyond its horizon.
//   worst_case:  only |sigma_hat(s)| <= sigma_hat(0) is known (sound for any
//                genuine spectral measure: internal systems, measured data).
//   assume_zero: coefficients vanish beyond the horizon (synthetic sequences
//                defined by finitely many coefficients).
enum class TailMode { worst_case, assume_zero };

// sigma_hat(s) = (T^s f, f) for |s| <= s_max.  Hermitian symmetry and
// positive semidefiniteness of sampled Toeplitz minors are enforced on
// construction.
class CorrelationSequence {
 public:
  CorrelationSequence(std::int64_t s_max, std::vector<Complex> values, std::string source,
                      TailMode tail = TailMode::worst_case);

  std::int64_t s_max() const { return s_max_; }
  Complex at(std::int64_t s) const { return values_[static_cast<std::size_t>(s + s_max_)]; }
  double mass() const { return at(0).real(); }  // sigma_hat(0) = |f|^2
  const std::string& source() const { return source_; }
  TailMode tail() const { return tail_; }

  static CorrelationSequence dirac_at_zero(std::int64_t s_max, TailMode tail);
  static CorrelationSequence lebesgue(std::int64_t s_max, TailMode tail);
  static CorrelationSequence blend(const CorrelationSequence& a, const CorrelationSequence& b,
                                   double weight_a, std::string source);
  // Pointwise product: the spectral measure of a tensor vector on a product.
  static CorrelationSequence product(const CorrelationSequence& a, const CorrelationSequence& b,
                                     std::string source);

 private:
  std::int64_t s_max_;
  std::vector<Complex> values_;
  std::string source_;
  TailMode tail_;
};

// (T^s f, f) under the Koopman convention, for |s| <= s_max.  Requires
// |f| = 1 within 1e-12.
CorrelationSequence correlation_sequence(const CellAutomorphism& t, const std::vector<Complex>& f,
                                         std::int64_t s_max);
CorrelationSequence correlation_sequence(const CellAutomorphism& t, const CellFunction& f,
                                         std::int64_t s_max);

std::vector<Complex> normalized_complex(const std::vector<Complex>& raw, std::uint32_t n);

// Exact finite-dimensional spectral measure of a permutation operator: one
// atom per (cycle, frequency) at angle r/len of a turn, carrying the squared
// magnitude of the cycle-restricted Fourier coefficient weighted by cell
// mass.  Atoms at equal angles merge.
struct AtomicSpectrum {
  struct Atom {
    std::int64_t angle_num;  // reduced fraction of a turn, 0 <= num < den
    std::int64_t angle_den;
    double mass;
  };
  std::vector<Atom> atoms;

  double total_mass() const;
  Complex reconstruct(std::int64_t s) const;  // sum mass * e^{2 pi i s angle}
  double integrate_trapezoid(std::uint32_t k, std::uint32_t p) const;
};

AtomicSpectrum atomic_spectrum(const CellAutomorphism& t, const std::vector<Complex>& f);
AtomicSpectrum atomic_spectrum(const CellAutomorphism& t, const CellFunction& f);

// Trapezoid test profile for arc k of P: ramps 0..1 over arc k-1, plateau 1
// on arc k, ramps down over arc k+1 (indices mod P, arcs [k/P, (k+1)/P) in
// angle-of-turn coordinates).  Exact at any angle.
double trapezoid_value(std::uint32_t k, std::uint32_t p, double angle_turns);

// Fourier coefficient of the trapezoid centered at its plateau midpoint:
// T(P, 0) = 2/P and T(P, s) = P sin(2 pi s / P) sin(pi s / P) / (pi s)^2,
// so |T(P, s)| <= min(2/P, P/(pi s)^2).  The full coefficient of arc k is
// T(P, s) e^{-2 pi i s (k + 1/2) / P}.
double trapezoid_coefficient(std::uint32_t p, std::int64_t s);

// Fejer-weighted estimate of the integral of the arc-k trapezoid against the
// measure behind `corr`, with a certified enclosure of the true integral:
//   value = sum_{|s| <= d} (1 - |s|/(d+1)) coef_k(s) sigma_hat(s)
//   known = same sum over every provided coefficient, unweighted
//   the true integral lies in [known - tail, known + tail], where tail = 0
//   under assume_zero and sigma_hat(0) * 2P/(pi^2 s_max) under worst_case
//   (sum_{|s| > s_max} |T(P, s)| < 2P/(pi^2 s_max)).
// bound = |value - known| + tail, so [value - bound, value + bound] also
// encloses the true integral.
struct DeltaIntegral {
  double value = 0.0;
  double bound = 0.0;
  double lower = 0.0;  // known - tail
  double upper = 0.0;  // known + tail
};

DeltaIntegral delta_integral(const CorrelationSequence& corr, std::uint32_t k, std::uint32_t p,
                             std::int64_t degree);

// All P arcs at once (residue-class accumulation, O(s_max + P^2)).
std::vector<DeltaIntegral> arc_integrals(const CorrelationSequence& corr, std::uint32_t p,
                                         std::int64_t degree);

// Arc-counting test: |{k : integral of Delta_{k,P} d sigma < 1/(N P)}|.
// Decisions use the d-independent enclosure [lower, upper], so enlarging the
// schedules never retracts a witness.  `count` includes only certified
// members; `uncertified` arcs are flagged.
struct DCountResult {
  std::size_t count = 0;
  std::size_t certified_out = 0;
  std::size_t uncertified = 0;
  bool certified = false;  // every arc decided
  double max_bound = 0.0;
};

DCountResult d_count(const CorrelationSequence& corr, std::uint32_t n_param, std::uint32_t p,
                     std::int64_t degree);

struct ClassifyPolicy {
  std::uint64_t degree_multiplier = 64;  // d = min(mult * P * N, s_max)
  std::int64_t degree(std::uint32_t n_param, std::uint32_t p, std::int64_t s_max) const;
};

// Arc-counting singularity classifier.
//   singular_witnessed:      every N in the schedule has some P with a
//                            certified count > (1 - 1/N) P.
//   not_singular_at_horizon: some N is certified to fail at every scheduled P
//                            (at least P/N arcs certifiably carry mass
//                            >= 1/(N P)).
//   inconclusive:            neither, within the schedules.
struct SingularityVerdict {
  enum class Kind { singular_witnessed, not_singular_at_horizon, inconclusive };

  struct Row {
    std::uint32_t n_param;
    std::uint32_t p;
    DCountResult counts;
    double threshold_arcs;  // (1 - 1/N) P
  };

  Kind verdict = Kind::inconclusive;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> witness;  // (N, P)
  double margin = 0.0;        // arcs beyond threshold, normalized by P
  double error_budget = 0.0;  // largest bound used in any decision
  std::vector<Row> rows;

  std::string verdict_name() const;
};

SingularityVerdict classify_singular(const CorrelationSequence& corr,
                                     const std::vector<std::uint32_t>& n_schedule,
                                     const std::vector<std::uint32_t>& p_schedule,
                                     const ClassifyPolicy& policy = {});

// CSV exchange format: header "s,re,im", one row per lag from -s_max to
// s_max.
void save_correlation_csv(const CorrelationSequence& corr, const std::string& path);
CorrelationSequence load_correlation_csv(const std::string& path, TailMode tail);

// Smallest eigenvalue of a dense Hermitian matrix (row-major q x q), via
// Jacobi iteration on the real symmetric embedding.
double hermitian_min_eigenvalue(const std::vector<Complex>& m, std::size_t q);

}  // namespace ergolab
