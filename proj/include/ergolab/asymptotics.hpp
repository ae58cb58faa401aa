#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/cellsys.hpp"

namespace ergolab {

// Admissible operator polynomial P(T) = c Theta + sum_i c_i T^i with
// nonnegative weights summing to 1; Theta projects onto constants.
struct AdmissibleFunction {
  double theta_weight = 0.0;
  std::vector<double> coeffs;  // c_0, c_1, ...

  AdmissibleFunction(double c, std::vector<double> cs);
  static AdmissibleFunction pure_theta() { return AdmissibleFunction(1.0, {}); }
  static AdmissibleFunction identity_poly() { return AdmissibleFunction(0.0, {1.0}); }  // c_0 = 1
};

// P(T) f with the Koopman convention (T f)(x) = f(T^{-1} x).
CellFunction admissible_apply(const AdmissibleFunction& p, const CellAutomorphism& t,
                              const CellFunction& f);

// max_{i,k <= N} |mu(A_i cap T^j A_k) - mu(A_i) mu(A_k)|, exact.
Rational phi_mix(const CellAutomorphism& t, const DenseFamily& fam, std::size_t N, std::int64_t j);

// max_{i <= N} (mu(A_i) - mu(A_i cap T^j A_i)), exact, in [0, 1].
Rational psi_rigid(const CellAutomorphism& t, const DenseFamily& fam, std::size_t N, std::int64_t j);

// max_{i <= N} (a mu(A_i) - mu(A_i cap T^j A_i)); a = 1 recovers psi_rigid.
Rational psi_partial(const CellAutomorphism& t, const DenseFamily& fam, const Rational& a,
                     std::size_t N, std::int64_t j);

enum class ScanFunctional { mixing, rigidity, partial_rigidity };

struct ScanReport {
  std::map<std::int64_t, Rational> values;
  std::vector<std::int64_t> witnesses;  // lags with value < 1/N, exact comparison
  std::int64_t horizon = 0;
  std::optional<std::uint64_t> period;  // system period when <= horizon
  std::size_t N = 0;
};

ScanReport scan(const CellAutomorphism& t, const DenseFamily& fam, std::size_t N,
                std::int64_t j_min, std::int64_t j_max, ScanFunctional functional,
                const Rational& a = Rational(1));

// max_{m,n <= N} |<(T^j - P(T)) f_m, f_n>| over normalized test vectors.
double weak_limit_distance(const CellAutomorphism& t, std::int64_t j, const AdmissibleFunction& p,
                           const std::vector<CellFunction>& tests, std::size_t N);

enum class Direction { forward, backward };

// mu(A cap T^{+-m} A cap T^{+-3m} A), exact.
Rational triple_correlation(const CellAutomorphism& t, const CellSet& a, std::int64_t m,
                            Direction direction);

// forward minus backward triple correlation at lag m.
Rational asymmetry_gap(const CellAutomorphism& t, const CellSet& a, std::int64_t m);

// Reference limit values the triple-correlation functionals are designed to
// detect: forward (mu + mu^2 + 2 mu^3)/4 and backward mu^2.  No system built
// by this library attains them; they are kept as calibration targets.
Rational triple_forward_target(const Rational& mu);
Rational triple_backward_target(const Rational& mu);

}  // namespace ergolab
