#include "ergolab/asymptotics.hpp"

#include <cmath>

namespace ergolab {

AdmissibleFunction::AdmissibleFunction(double c, std::vector<double> cs)
    : theta_weight(c), coeffs(std::move(cs)) {
  if (theta_weight < 0) throw ValidationError("theta weight must be nonnegative");
  double total = theta_weight;
  for (double v : coeffs) {
    if (v < 0) throw ValidationError("admissible coefficients must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("admissible coefficients must sum to 1");
}

CellFunction admissible_apply(const AdmissibleFunction& p, const CellAutomorphism& t,
                              const CellFunction& f) {
  if (t.space_size() != f.n) throw SpaceMismatchError("admissible_apply across spaces");
  std::vector<double> out(f.n, p.theta_weight * f.mean());
  CellFunction shifted = f;
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
    if (i > 0) shifted = koopman_apply(t, shifted);
    if (p.coeffs[i] == 0.0) continue;
    for (std::uint32_t x = 0; x < f.n; ++x) out[x] += p.coeffs[i] * shifted.values[x];
  }
  return CellFunction(CellSpace(f.n), std::move(out));
}

namespace {
void check_scan_args(const DenseFamily& fam, std::size_t N) {
  if (N < 1 || N > fam.size()) throw ValidationError("N out of family range");
}
}  // namespace

Rational phi_mix(const CellAutomorphism& t, const DenseFamily& fam, std::size_t N, std::int64_t j) {
  check_scan_args(fam, N);
  if (t.space_size() != fam.space_size()) throw SpaceMismatchError("phi_mix across spaces");
  const CellAutomorphism tj = power(t, j);
  Rational best = 0;
  std::vector<CellSet> images;
  images.reserve(N);
  for (std::size_t k = 1; k <= N; ++k) images.push_back(apply_set(tj, fam.at(k)));
  for (std::size_t i = 1; i <= N; ++i) {
    const Rational mu_i = fam.at(i).measure();
    for (std::size_t k = 1; k <= N; ++k) {
      Rational diff = intersection_measure(fam.at(i), images[k - 1]) - mu_i * fam.at(k).measure();
      if (diff < 0) diff = -diff;
      if (diff > best) best = diff;
    }
  }
  return best;
}

Rational psi_partial(const CellAutomorphism& t, const DenseFamily& fam, const Rational& a,
                     std::size_t N, std::int64_t j) {
  check_scan_args(fam, N);
  if (a <= 0 || a > 1) throw ValidationError("partial-rigidity parameter must be in (0, 1]");
  if (t.space_size() != fam.space_size()) throw SpaceMismatchError("psi across spaces");
  const CellAutomorphism tj = power(t, j);
  bool first = true;
  Rational best = 0;
  for (std::size_t i = 1; i <= N; ++i) {
    const CellSet& ai = fam.at(i);
    const Rational v = a * ai.measure() - intersection_measure(ai, apply_set(tj, ai));
    if (first || v > best) {
      best = v;
      first = false;
    }
  }
  return best;
}

Rational psi_rigid(const CellAutomorphism& t, const DenseFamily& fam, std::size_t N, std::int64_t j) {
  return psi_partial(t, fam, Rational(1), N, j);
}

ScanReport scan(const CellAutomorphism& t, const DenseFamily& fam, std::size_t N,
                std::int64_t j_min, std::int64_t j_max, ScanFunctional functional,
                const Rational& a) {
  if (j_min > j_max) throw ValidationError("empty scan range");
  ScanReport report;
  report.horizon = j_max;
  report.N = N;
  report.period = t.order(static_cast<std::uint64_t>(std::max<std::int64_t>(j_max, 0)));
  const Rational threshold(1, static_cast<std::int64_t>(N));
  for (std::int64_t j = j_min; j <= j_max; ++j) {
    Rational v;
    switch (functional) {
      case ScanFunctional::mixing: v = phi_mix(t, fam, N, j); break;
      case ScanFunctional::rigidity: v = psi_rigid(t, fam, N, j); break;
      case ScanFunctional::partial_rigidity: v = psi_partial(t, fam, a, N, j); break;
    }
    if (v < threshold) report.witnesses.push_back(j);
    report.values.emplace(j, std::move(v));
  }
  return report;
}

double weak_limit_distance(const CellAutomorphism& t, std::int64_t j, const AdmissibleFunction& p,
                           const std::vector<CellFunction>& tests, std::size_t N) {
  if (N < 1 || N > tests.size()) throw ValidationError("N out of test-family range");
  for (const auto& f : tests) {
    if (f.n != t.space_size()) throw SpaceMismatchError("test vector on wrong space");
    if (f.norm() > 1.0 + 1e-12) throw ValidationError("test vectors must lie in the unit ball");
  }
  const CellAutomorphism tj = power(t, j);
  double best = 0.0;
  for (std::size_t m = 0; m < N; ++m) {
    const CellFunction lhs_j = koopman_apply(tj, tests[m]);
    const CellFunction lhs_p = admissible_apply(p, t, tests[m]);
    CellFunction diff = lhs_j;
    for (std::uint32_t x = 0; x < diff.n; ++x) diff.values[x] -= lhs_p.values[x];
    for (std::size_t n = 0; n < N; ++n)
      best = std::max(best, std::abs(inner_product(diff, tests[n])));
  }
  return best;
}

Rational triple_correlation(const CellAutomorphism& t, const CellSet& a, std::int64_t m,
                            Direction direction) {
  if (t.space_size() != a.space_size()) throw SpaceMismatchError("triple correlation across spaces");
  const std::int64_t sign = direction == Direction::forward ? 1 : -1;
  const CellSet b = apply_set(power(t, sign * m), a);
  const CellSet c = apply_set(power(t, sign * 3 * m), a);
  const std::size_t cnt = CellMask::and3_count(a.mask(), b.mask(), c.mask());
  return Rational(static_cast<std::int64_t>(cnt), a.space_size());
}

Rational asymmetry_gap(const CellAutomorphism& t, const CellSet& a, std::int64_t m) {
  return triple_correlation(t, a, m, Direction::forward) -
         triple_correlation(t, a, m, Direction::backward);
}

Rational triple_forward_target(const Rational& mu) {
  return (mu + mu * mu + 2 * mu * mu * mu) / 4;
}

Rational triple_backward_target(const Rational& mu) { return mu * mu; }

}  // namespace ergolab
