#include "ergolab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ergolab {

namespace {

constexpr double kPi = std::numbers::pi;

double fract(double x) { return x - std::floor(x); }

}  // namespace

CorrelationSequence::CorrelationSequence(std::int64_t s_max, std::vector<Complex> values,
                                         std::string source, TailMode tail)
    : s_max_(s_max), values_(std::move(values)), source_(std::move(source)), tail_(tail) {
  if (s_max_ < 0 || values_.size() != static_cast<std::size_t>(2 * s_max_ + 1))
    throw ValidationError("correlation sequence needs 2*s_max+1 values");
  const double m = mass();
  if (!(m > 0) || std::abs(at(0).imag()) > 1e-9 * std::max(1.0, m))
    throw ValidationError("sigma_hat(0) must be real and positive");
  const double tol = 1e-9 * std::max(1.0, m);
  for (std::int64_t s = 1; s <= s_max_; ++s)
    if (std::abs(at(s) - std::conj(at(-s))) > tol)
      throw ValidationError("correlation sequence is not Hermitian at lag " + std::to_string(s));
  // Positive semidefiniteness spot check on Toeplitz minors of order <= 8.
  for (const std::int64_t stride : {std::int64_t{1}, s_max_ / 15 + 1, s_max_ / 7 + 1}) {
    const std::size_t q = static_cast<std::size_t>(
        std::min<std::int64_t>(8, stride > 0 ? s_max_ / stride + 1 : 1));
    if (q < 2) continue;
    std::vector<Complex> minor(q * q);
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = 0; b < q; ++b)
        minor[a * q + b] = at((static_cast<std::int64_t>(a) - static_cast<std::int64_t>(b)) * stride);
    if (hermitian_min_eigenvalue(minor, q) < -1e-9 * std::max(1.0, m))
      throw ValidationError("correlation sequence fails positive semidefiniteness (stride " +
                            std::to_string(stride) + ")");
  }
}

CorrelationSequence CorrelationSequence::dirac_at_zero(std::int64_t s_max, TailMode tail) {
  std::vector<Complex> v(static_cast<std::size_t>(2 * s_max + 1), Complex{1.0, 0.0});
  return CorrelationSequence(s_max, std::move(v), "dirac_at_zero", tail);
}

CorrelationSequence CorrelationSequence::lebesgue(std::int64_t s_max, TailMode tail) {
  std::vector<Complex> v(static_cast<std::size_t>(2 * s_max + 1), Complex{0.0, 0.0});
  v[static_cast<std::size_t>(s_max)] = 1.0;
  return CorrelationSequence(s_max, std::move(v), "lebesgue", tail);
}

CorrelationSequence CorrelationSequence::blend(const CorrelationSequence& a,
                                               const CorrelationSequence& b, double weight_a,
                                               std::string source) {
  if (a.s_max() != b.s_max()) throw ValidationError("blend needs equal horizons");
  if (weight_a < 0 || weight_a > 1) throw ValidationError("blend weight must be in [0,1]");
  std::vector<Complex> v(static_cast<std::size_t>(2 * a.s_max() + 1));
  for (std::int64_t s = -a.s_max(); s <= a.s_max(); ++s)
    v[static_cast<std::size_t>(s + a.s_max())] = weight_a * a.at(s) + (1 - weight_a) * b.at(s);
  const TailMode tail = (a.tail() == TailMode::assume_zero && b.tail() == TailMode::assume_zero)
                            ? TailMode::assume_zero
                            : TailMode::worst_case;
  return CorrelationSequence(a.s_max(), std::move(v), std::move(source), tail);
}

CorrelationSequence CorrelationSequence::product(const CorrelationSequence& a,
                                                 const CorrelationSequence& b, std::string source) {
  const std::int64_t s_max = std::min(a.s_max(), b.s_max());
  std::vector<Complex> v(static_cast<std::size_t>(2 * s_max + 1));
  for (std::int64_t s = -s_max; s <= s_max; ++s)
    v[static_cast<std::size_t>(s + s_max)] = a.at(s) * b.at(s);
  return CorrelationSequence(s_max, std::move(v), std::move(source), TailMode::worst_case);
}

std::vector<Complex> normalized_complex(const std::vector<Complex>& raw, std::uint32_t n) {
  if (raw.size() != n) throw SpaceMismatchError("vector size differs from cell count");
  double norm2 = 0.0;
  for (const Complex& z : raw) norm2 += std::norm(z);
  norm2 /= n;
  if (norm2 <= 0) throw ValidationError("cannot normalize the zero vector");
  const double scale = 1.0 / std::sqrt(norm2);
  std::vector<Complex> out(raw);
  for (Complex& z : out) z *= scale;
  return out;
}

CorrelationSequence correlation_sequence(const CellAutomorphism& t, const std::vector<Complex>& f,
                                         std::int64_t s_max) {
  const std::uint32_t n = t.space_size();
  if (f.size() != n) throw SpaceMismatchError("vector size differs from cell count");
  if (s_max < 0) throw ValidationError("s_max must be nonnegative");
  double norm2 = 0.0;
  for (const Complex& z : f) norm2 += std::norm(z);
  norm2 /= n;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw ValidationError("correlation_sequence needs a unit vector");
  std::vector<Complex> values(static_cast<std::size_t>(2 * s_max + 1));
  // g_s = f o T^{-s}; advance with one gather per lag.
  std::vector<Complex> g(f);
  for (std::int64_t s = 0; s <= s_max; ++s) {
    Complex acc{0.0, 0.0};
    for (std::uint32_t x = 0; x < n; ++x) acc += g[x] * std::conj(f[x]);
    acc /= static_cast<double>(n);
    values[static_cast<std::size_t>(s_max + s)] = acc;
    values[static_cast<std::size_t>(s_max - s)] = std::conj(acc);
    if (s < s_max) {
      std::vector<Complex> next(n);
      for (std::uint32_t x = 0; x < n; ++x) next[x] = g[t.apply_inverse(x)];
      g.swap(next);
    }
  }
  return CorrelationSequence(s_max, std::move(values), "system", TailMode::worst_case);
}

CorrelationSequence correlation_sequence(const CellAutomorphism& t, const CellFunction& f,
                                         std::int64_t s_max) {
  std::vector<Complex> v(f.values.begin(), f.values.end());
  return correlation_sequence(t, v, s_max);
}

double AtomicSpectrum::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.mass;
  return m;
}

Complex AtomicSpectrum::reconstruct(std::int64_t s) const {
  Complex acc{0.0, 0.0};
  for (const Atom& a : atoms) {
    const double phase = 2.0 * kPi * static_cast<double>(s) *
                         (static_cast<double>(a.angle_num) / static_cast<double>(a.angle_den));
    acc += a.mass * Complex{std::cos(phase), std::sin(phase)};
  }
  return acc;
}

double AtomicSpectrum::integrate_trapezoid(std::uint32_t k, std::uint32_t p) const {
  double acc = 0.0;
  for (const Atom& a : atoms)
    acc += a.mass * trapezoid_value(k, p, static_cast<double>(a.angle_num) /
                                              static_cast<double>(a.angle_den));
  return acc;
}

AtomicSpectrum atomic_spectrum(const CellAutomorphism& t, const std::vector<Complex>& f) {
  const std::uint32_t n = t.space_size();
  if (f.size() != n) throw SpaceMismatchError("vector size differs from cell count");
  std::map<std::pair<std::int64_t, std::int64_t>, double> merged;
  for (const auto& cycle : t.cycles()) {
    const std::size_t len = cycle.size();
    // Walk the cycle in orbit order c, T c, T^2 c, ...
    for (std::size_t r = 0; r < len; ++r) {
      Complex coeff{0.0, 0.0};
      for (std::size_t m = 0; m < len; ++m) {
        const double phase = 2.0 * kPi * static_cast<double>(r) * static_cast<double>(m) /
                             static_cast<double>(len);
        coeff += f[cycle[m]] * Complex{std::cos(phase), std::sin(phase)};
      }
      coeff /= static_cast<double>(len);
      const double mass = std::norm(coeff) * static_cast<double>(len) / static_cast<double>(n);
      const std::int64_t g = std::gcd(static_cast<std::int64_t>(r), static_cast<std::int64_t>(len));
      merged[{static_cast<std::int64_t>(r) / g, static_cast<std::int64_t>(len) / g}] += mass;
    }
  }
  AtomicSpectrum spec;
  spec.atoms.reserve(merged.size());
  for (const auto& [angle, mass] : merged) {
    if (mass <= 1e-14) continue;  // numerically silent frequencies
    spec.atoms.push_back({angle.first, angle.second, mass});
  }
  std::sort(spec.atoms.begin(), spec.atoms.end(), [](const auto& a, const auto& b) {
    return static_cast<double>(a.angle_num) * static_cast<double>(b.angle_den) <
           static_cast<double>(b.angle_num) * static_cast<double>(a.angle_den);
  });
  return spec;
}

AtomicSpectrum atomic_spectrum(const CellAutomorphism& t, const CellFunction& f) {
  std::vector<Complex> v(f.values.begin(), f.values.end());
  return atomic_spectrum(t, v);
}

double trapezoid_value(std::uint32_t k, std::uint32_t p, double angle_turns) {
  if (p < 3) throw ValidationError("trapezoid needs P >= 3");
  if (k >= p) throw ValidationError("arc index out of range");
  // Distance from the start of the ramp-up arc, wrapped to [0, 1).
  const double d = fract(angle_turns - (static_cast<double>(k) - 1.0) / p);
  const double dp = d * p;
  if (dp < 1.0) return dp;
  if (dp < 2.0) return 1.0;
  if (dp < 3.0) return 3.0 - dp;
  return 0.0;
}

double trapezoid_coefficient(std::uint32_t p, std::int64_t s) {
  if (p < 3) throw ValidationError("trapezoid needs P >= 3");
  if (s == 0) return 2.0 / p;
  const double sd = static_cast<double>(s);
  return p * std::sin(2.0 * kPi * sd / p) * std::sin(kPi * sd / p) / (kPi * kPi * sd * sd);
}

namespace {

double tail_allowance(const CorrelationSequence& corr, std::uint32_t p) {
  if (corr.tail() == TailMode::assume_zero) return 0.0;
  // sum_{|s| > s_max} |T(P, s)| <= 2 sum_{s > s_max} P/(pi s)^2 < 2P/(pi^2 s_max)
  if (corr.s_max() == 0) return 2.0 * corr.mass();  // no information at all
  return corr.mass() * 2.0 * p / (kPi * kPi * static_cast<double>(corr.s_max()));
}

}  // namespace

std::vector<DeltaIntegral> arc_integrals(const CorrelationSequence& corr, std::uint32_t p,
                                         std::int64_t degree) {
  if (degree < 0 || degree > corr.s_max())
    throw ValidationError("degree exceeds available lags");
  if (p < 3) throw ValidationError("trapezoid needs P >= 3");
  // Group by s mod P: coef_k(s) = T(s) e^{-i pi s / P} e^{-2 pi i s k / P}
  // and the last factor depends only on s mod P.
  std::vector<Complex> g_weighted(p, Complex{0.0, 0.0});
  std::vector<Complex> g_full(p, Complex{0.0, 0.0});
  for (std::int64_t s = -corr.s_max(); s <= corr.s_max(); ++s) {
    const double t_coef = trapezoid_coefficient(p, s);
    if (t_coef == 0.0 && s != 0) continue;
    const double half_phase = -kPi * static_cast<double>(s) / p;
    const Complex base = t_coef * corr.at(s) * Complex{std::cos(half_phase), std::sin(half_phase)};
    const std::size_t m = static_cast<std::size_t>(((s % p) + p) % p);
    g_full[m] += base;
    if (std::llabs(s) <= degree)
      g_weighted[m] += (1.0 - static_cast<double>(std::llabs(s)) / static_cast<double>(degree + 1)) * base;
  }
  std::vector<Complex> twiddle(p);
  for (std::uint32_t u = 0; u < p; ++u) {
    const double phase = -2.0 * kPi * static_cast<double>(u) / p;
    twiddle[u] = Complex{std::cos(phase), std::sin(phase)};
  }
  const double allow = tail_allowance(corr, p);
  std::vector<DeltaIntegral> out(p);
  for (std::uint32_t k = 0; k < p; ++k) {
    Complex vw{0.0, 0.0}, vf{0.0, 0.0};
    for (std::uint32_t m = 0; m < p; ++m) {
      const Complex& tw = twiddle[static_cast<std::size_t>((std::uint64_t{m} * k) % p)];
      vw += g_weighted[m] * tw;
      vf += g_full[m] * tw;
    }
    DeltaIntegral di;
    di.value = vw.real();
    const double known = vf.real();
    di.lower = known - allow;
    di.upper = known + allow;
    di.bound = std::abs(di.value - known) + allow;
    out[k] = di;
  }
  return out;
}

DeltaIntegral delta_integral(const CorrelationSequence& corr, std::uint32_t k, std::uint32_t p,
                             std::int64_t degree) {
  if (degree < 0 || degree > corr.s_max())
    throw ValidationError("degree exceeds available lags");
  if (p < 3) throw ValidationError("trapezoid needs P >= 3");
  if (k >= p) throw ValidationError("arc index out of range");
  Complex vw{0.0, 0.0}, vf{0.0, 0.0};
  for (std::int64_t s = -corr.s_max(); s <= corr.s_max(); ++s) {
    const double t_coef = trapezoid_coefficient(p, s);
    if (t_coef == 0.0 && s != 0) continue;
    const double phase = -2.0 * kPi * static_cast<double>(s) * (k + 0.5) / p;
    const Complex term = t_coef * corr.at(s) * Complex{std::cos(phase), std::sin(phase)};
    vf += term;
    if (std::llabs(s) <= degree)
      vw += (1.0 - static_cast<double>(std::llabs(s)) / static_cast<double>(degree + 1)) * term;
  }
  const double allow = tail_allowance(corr, p);
  DeltaIntegral di;
  di.value = vw.real();
  const double known = vf.real();
  di.lower = known - allow;
  di.upper = known + allow;
  di.bound = std::abs(di.value - known) + allow;
  return di;
}

DCountResult d_count(const CorrelationSequence& corr, std::uint32_t n_param, std::uint32_t p,
                     std::int64_t degree) {
  if (n_param < 1) throw ValidationError("N must be >= 1");
  const auto arcs = arc_integrals(corr, p, degree);
  const double threshold = 1.0 / (static_cast<double>(n_param) * p);
  DCountResult r;
  for (const DeltaIntegral& di : arcs) {
    r.max_bound = std::max(r.max_bound, di.bound);
    if (di.upper < threshold)
      ++r.count;
    else if (di.lower >= threshold)
      ++r.certified_out;
    else
      ++r.uncertified;
  }
  r.certified = r.uncertified == 0;
  return r;
}

std::int64_t ClassifyPolicy::degree(std::uint32_t n_param, std::uint32_t p,
                                    std::int64_t s_max) const {
  const std::uint64_t want = degree_multiplier * p * n_param;
  return static_cast<std::int64_t>(std::min<std::uint64_t>(want, static_cast<std::uint64_t>(s_max)));
}

std::string SingularityVerdict::verdict_name() const {
  switch (verdict) {
    case Kind::singular_witnessed: return "singular_witnessed";
    case Kind::not_singular_at_horizon: return "not_singular_at_horizon";
    case Kind::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

SingularityVerdict classify_singular(const CorrelationSequence& corr,
                                     const std::vector<std::uint32_t>& n_schedule,
                                     const std::vector<std::uint32_t>& p_schedule,
                                     const ClassifyPolicy& policy) {
  if (n_schedule.empty() || p_schedule.empty())
    throw ValidationError("classifier schedules must be nonempty");
  SingularityVerdict out;
  bool all_witnessed = true;
  double witness_margin = 0.0;
  bool witness_margin_set = false;
  for (const std::uint32_t n_param : n_schedule) {
    bool witnessed = false;
    bool fails_everywhere = true;
    double fail_margin = 0.0;
    bool fail_margin_set = false;
    for (const std::uint32_t p : p_schedule) {
      const auto deg = policy.degree(n_param, p, corr.s_max());
      const DCountResult counts = d_count(corr, n_param, p, deg);
      out.error_budget = std::max(out.error_budget, counts.max_bound);
      const double threshold_arcs = (1.0 - 1.0 / n_param) * p;
      out.rows.push_back({n_param, p, counts, threshold_arcs});
      if (!witnessed && counts.count > threshold_arcs) {
        witnessed = true;
        out.witness = {n_param, p};
        const double margin = (counts.count - threshold_arcs) / p;
        if (!witness_margin_set || margin < witness_margin) {
          witness_margin = margin;
          witness_margin_set = true;
        }
      }
      // Failure at (N, P) is certified when at least P/N arcs provably hold
      // mass >= 1/(N P); then |D| can never exceed (1 - 1/N) P.
      const double fail_needed = static_cast<double>(p) / n_param;
      if (counts.certified_out >= fail_needed) {
        const double margin = (counts.certified_out - fail_needed) / p;
        if (!fail_margin_set || margin < fail_margin) {
          fail_margin = margin;
          fail_margin_set = true;
        }
      } else {
        fails_everywhere = false;
      }
    }
    if (!witnessed) all_witnessed = false;
    if (fails_everywhere && out.verdict != SingularityVerdict::Kind::not_singular_at_horizon) {
      out.verdict = SingularityVerdict::Kind::not_singular_at_horizon;
      out.margin = fail_margin_set ? fail_margin : 0.0;
    }
  }
  if (all_witnessed) {
    out.verdict = SingularityVerdict::Kind::singular_witnessed;
    out.margin = witness_margin;
  } else if (out.verdict != SingularityVerdict::Kind::not_singular_at_horizon) {
    out.verdict = SingularityVerdict::Kind::inconclusive;
    out.witness.reset();
    out.margin = 0.0;
  }
  if (out.verdict != SingularityVerdict::Kind::singular_witnessed &&
      out.verdict != SingularityVerdict::Kind::inconclusive) {
    out.witness.reset();
  }
  return out;
}

void save_correlation_csv(const CorrelationSequence& corr, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "s,re,im\n";
  char buf[96];
  for (std::int64_t s = -corr.s_max(); s <= corr.s_max(); ++s) {
    const Complex z = corr.at(s);
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(s), z.real(),
                  z.imag());
    os << buf;
  }
}

CorrelationSequence load_correlation_csv(const std::string& path, TailMode tail) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  std::map<std::int64_t, Complex> entries;
  std::int64_t max_abs = 0;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.find("re") != std::string::npos) continue;  // header
    std::stringstream ss(line);
    std::string tok;
    double cols[3];
    int got = 0;
    while (std::getline(ss, tok, ',') && got < 3) {
      try {
        cols[got++] = std::stod(tok);
      } catch (const std::exception&) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
    }
    if (got != 3)
      throw ValidationError(path + ":" + std::to_string(line_no) + ": expected s,re,im");
    const std::int64_t s = static_cast<std::int64_t>(cols[0]);
    entries[s] = Complex{cols[1], cols[2]};
    max_abs = std::max(max_abs, static_cast<std::int64_t>(std::llabs(s)));
  }
  if (entries.empty()) throw ValidationError(path + ": empty correlation file");
  std::vector<Complex> values(static_cast<std::size_t>(2 * max_abs + 1));
  for (std::int64_t s = -max_abs; s <= max_abs; ++s) {
    const auto it = entries.find(s);
    if (it == entries.end())
      throw ValidationError(path + ": missing lag " + std::to_string(s));
    values[static_cast<std::size_t>(s + max_abs)] = it->second;
  }
  return CorrelationSequence(max_abs, std::move(values), "csv:" + path, tail);
}

double hermitian_min_eigenvalue(const std::vector<Complex>& m, std::size_t q) {
  // Real symmetric embedding [[X, -Y], [Y, X]] of X + iY shares the
  // eigenvalues of the Hermitian matrix (each doubled).
  const std::size_t d = 2 * q;
  std::vector<double> a(d * d, 0.0);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      const double x = m[i * q + j].real();
      const double y = m[i * q + j].imag();
      a[i * d + j] = x;
      a[(i + q) * d + (j + q)] = x;
      a[i * d + (j + q)] = -y;
      a[(i + q) * d + j] = y;
    }
  // Cyclic Jacobi sweeps.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t r = p + 1; r < d; ++r) off += a[p * d + r] * a[p * d + r];
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t r = p + 1; r < d; ++r) {
        const double apr = a[p * d + r];
        if (std::abs(apr) < 1e-18) continue;
        const double app = a[p * d + p];
        const double arr = a[r * d + r];
        const double tau = (arr - app) / (2.0 * apr);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < d; ++i) {
          const double aip = a[i * d + p];
          const double air = a[i * d + r];
          a[i * d + p] = c * aip - s * air;
          a[i * d + r] = s * aip + c * air;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double api = a[p * d + i];
          const double ari = a[r * d + i];
          a[p * d + i] = c * api - s * ari;
          a[r * d + i] = s * api + c * ari;
        }
      }
  }
  double min_eig = a[0];
  for (std::size_t i = 1; i < d; ++i) min_eig = std::min(min_eig, a[i * d + i]);
  return min_eig;
}

}  // namespace ergolab
