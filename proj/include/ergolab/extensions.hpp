#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergolab/asymptotics.hpp"
#include "ergolab/cellsys.hpp"
#include "ergolab/seqtypes.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

// Cocycle of a skew product: C(x, n) = R_{S^{n-1} x} ... R_{S x} R_x, the
// fiber map accumulated along the base orbit.  C(x, 0) is the identity and
// C(x, n + m) = C(S^n x, m) o C(x, n).
CellAutomorphism cocycle(const SkewSystem& skew, std::uint32_t x, std::int64_t n);

// Memoizes cocycle prefixes per base point up to a budget of stored fiber
// maps; purely an accelerator, results match cocycle() exactly.  Over budget
// the returned reference points at scratch storage that the next call
// overwrites.
class CocycleCache {
 public:
  explicit CocycleCache(const SkewSystem& skew, std::size_t max_cached_maps = 1 << 16);
  const CellAutomorphism& at(std::uint32_t x, std::uint32_t n);

 private:
  const SkewSystem& skew_;
  std::size_t budget_;
  std::size_t stored_ = 0;
  std::vector<std::vector<CellAutomorphism>> prefixes_;  // prefixes_[x][n] = C(x, n)
  std::vector<std::uint32_t> orbit_next_;                // S^n x alongside prefixes
  CellAutomorphism scratch_;
};

// Relative weak-mixing functional:
//   max_{i,k <= N} (1/n_base) sum_x (1/j) sum_{n=1..j}
//       (mu_fib(C(x,n) A_i cap A_k) - mu(A_i) mu(A_k))^2
// computed exactly over the fiber family.
Rational rwm_functional(const SkewSystem& skew, const DenseFamily& fiber_family, std::size_t N,
                        std::int64_t j);

// Closed form of the functional for S x Id: max (mu(A_i cap A_k) - mu mu)^2.
Rational rwm_trivial_value(const DenseFamily& fiber_family, std::size_t N);

// Cocycle-recurrence functional over a lag set:
//   prod_{p in lags} mu{ x in A cap S^p A : rho(C(x,p), Id) < 1/N }
// with the fiber Halmos distance taken over fiber_family (exact comparison).
Rational recurrence_functional(const SkewSystem& skew, const CellSet& base_set,
                               const std::vector<std::int64_t>& lags, std::size_t N,
                               const DenseFamily& fiber_family);

// Slice statistics used to probe for a factor independent of the base: the
// fiber mass h(x) of each base slice of E and, per lag, of E cap R^p E, with
// their deviations from constancy.
struct SliceProbe {
  Rational set_mass;          // mu tensor mu (E)
  Rational constancy_defect;  // max_x |h(x) - mass|
  struct LagRow {
    std::int64_t lag;
    Rational mean;    // mu tensor mu (E cap R^p E)
    Rational defect;  // max_x |h_p(x) - mean|
  };
  std::vector<LagRow> lags;
};

SliceProbe independent_factor_probe(const SkewSystem& skew, const CellSet& product_set,
                                    const std::vector<std::int64_t>& lags);

// Monte Carlo ensembles over random extensions.  Per-trial seeds derive from
// the master seed and trial index, so results are independent of execution
// order and thread count.
struct EnsembleSpec {
  enum class Sampler { uniform_permutations, near_identity };

  SystemDescriptor base;
  std::uint32_t fiber_n = 2;
  Sampler sampler = Sampler::uniform_permutations;
  std::uint32_t transpositions = 0;  // near_identity: count composed onto Id
  std::uint32_t trials = 0;
  std::uint64_t master_seed = 0;
};

std::vector<CellAutomorphism> sample_fibers(const EnsembleSpec& spec, std::uint32_t trial);
SkewSystem sample_extension(const EnsembleSpec& spec, std::uint32_t trial);

enum class LiftProperty { a_rigidity, weak_mixing_phi, rwm, hp_blowup };

struct LiftParams {
  std::size_t N = 2;
  Rational a = Rational(1);          // a_rigidity
  std::vector<std::int64_t> lags;    // a_rigidity / weak_mixing_phi scan lags
  std::int64_t rwm_j = 64;
  std::size_t family_i_max = 8;
  std::uint32_t bern_k = 2;          // hp_blowup fiber word model
  std::uint32_t bern_window = 12;
  std::uint32_t hp_j = 3;            // h_j lag base and progression length
  std::uint32_t hp_length = 5;
};

struct EnsembleRow {
  std::uint32_t trial;
  double value;
  bool witness;
};

struct EnsembleReport {
  std::string property;
  std::vector<EnsembleRow> rows;
  double observed_fraction = 0.0;  // of trials meeting the witness condition
  double control_value = 0.0;      // rwm: S x Id reference; hp: H(xi)/2
  std::string threshold_note;
  std::string horizon_note;
  std::uint64_t master_seed = 0;
};

EnsembleReport lift_experiment(const EnsembleSpec& spec, LiftProperty property,
                               const LiftParams& params, unsigned threads = 0);

// Per-block weak-limit profiling of a measurable family (a skew product over
// the identity): for every base block and candidate polynomial, the worst
// scanned-lag block-average distance; blocks report their best-fitting
// candidate and the margin to the runner-up.
struct FamilyProfileReport {
  struct BlockRow {
    std::int32_t block;
    std::vector<double> candidate_distance;
    std::size_t best_candidate;
    double margin;  // runner-up distance minus best distance
  };
  std::vector<BlockRow> blocks;
};

FamilyProfileReport family_profile(const SkewSystem& family, const Partition& blocks,
                                   const std::vector<AdmissibleFunction>& candidates,
                                   const std::vector<std::int64_t>& lag_list,
                                   const std::vector<CellFunction>& tests, std::size_t N);

}  // namespace ergolab
