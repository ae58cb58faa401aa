#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/cellsys.hpp"
#include "ergolab/seqtypes.hpp"

namespace ergolab {

// Shannon entropy of a partition in nats, with 0 ln 0 = 0.  Summation runs
// over the sorted count multiset so that partitions equal up to relabeling
// produce bit-identical values.
double partition_entropy(const Partition& p);
double entropy_from_counts(std::vector<std::uint64_t> counts, std::uint64_t n);

// Common refinement of {T^p xi : p in lags}: cell x is labeled by the tuple
// (xi label of T^{-p} x)_p, canonicalized by first occurrence.  Lags may be
// negative; lags = {0} returns xi canonicalized.
Partition refine(const CellAutomorphism& t, const Partition& xi, const std::vector<std::int64_t>& lags);

// Image partition: label(z) = xi label(phi^{-1} z).
Partition image_partition(const CellAutomorphism& phi, const Partition& xi);

// Fiber partition lifted to the product space, label(x, y) = xi(y).
Partition lift_fiber_partition(std::uint32_t base_n, const Partition& xi);

// Class counts of the refinement without building labels; the fast path for
// entropy sweeps.
std::vector<std::uint64_t> refinement_class_counts(const CellAutomorphism& t, const Partition& xi,
                                                   const std::vector<std::int64_t>& lags);

// h_j(T, xi; P_j) = H(join of T^p xi over P_j) / |P_j|.
double sequence_entropy_term(const CellAutomorphism& t, const Partition& xi,
                             const std::vector<std::int64_t>& lags);

struct HpEstimate {
  struct Row {
    std::uint32_t j;
    std::size_t lag_count;
    double refinement_entropy;
    double h_j;
  };
  std::vector<Row> rows;
  double estimate = 0.0;  // max of scanned h_j: a finite-horizon lower estimate
  std::uint32_t j_max = 0;
  std::string note;
};

// Horizon-capped lower estimate of limsup_j h_j; never extrapolated.
HpEstimate hp_estimate(const CellAutomorphism& t, const Partition& xi, const SequenceFamily& fam,
                       const std::vector<std::uint32_t>& j_values);

// sum_p H(T^p eta) - H(join) >= 0; zero exactly iff the shifted partitions
// are jointly independent.  Joint independence is decided in exact integer
// arithmetic (n^{L-1} * joint count == product of marginal counts over all
// nonempty joint classes), in which case 0.0 is returned outright.
double independence_defect(const CellAutomorphism& t, const Partition& eta,
                           const std::vector<std::int64_t>& lags);
bool jointly_independent(const CellAutomorphism& t, const Partition& eta,
                         const std::vector<std::int64_t>& lags);

// Conjugated-extension entropy run: R = base x fiber shift, R_q = J^{-1} R J,
// both entropies of the fiber partition along {j, 2j, ..., L j} per scanned j.
struct ConjugationEntropyRow {
  std::uint32_t j;
  double h_conjugated;     // h_j(R_q, xi)
  double h_image;          // h_j(R, J xi)
  bool above_half_entropy; // h_j > H(xi)/2
};

struct ConjugationEntropyReport {
  double partition_entropy = 0.0;
  std::vector<ConjugationEntropyRow> rows;
};

ConjugationEntropyReport conjugation_entropy_experiment(const SkewSystem& product,
                                                        const SkewSystem& j_system,
                                                        const Partition& fiber_partition,
                                                        std::uint32_t progression_length,
                                                        const std::vector<std::uint32_t>& j_values);

}  // namespace ergolab
