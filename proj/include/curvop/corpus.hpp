#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvop/operators.hpp"

namespace curvop {

// Named operator builders backing the CLI `example` command and the verify
// corpus.

// Bilateral weighted shift with w_0 = sqrt(1 - kappa); curvature is exactly
// kappa.  DomainError outside [0, 1] (larger targets come from direct sums).
OperatorSpec kappa_example(double kappa);
OperatorSpec unilateral_shift();
OperatorSpec shift_power(int m);
OperatorSpec backward_shift_op();
OperatorSpec jordan_nilpotent(int n);  // n x n subdiagonal ones
OperatorSpec dft_unitary(int n);
// Deterministic pseudorandom complex matrix scaled to sigma_max = 0.95
// (splitmix64 entries).
OperatorSpec random_contraction(int dim, std::uint64_t seed);
// Unilateral shift with up to max_overrides nonzero non-unit weights at
// random indices; curvature 1, index -1 regardless of the draw.
OperatorSpec random_weighted_shift(std::uint64_t seed, int max_overrides = 4);
// floor(target) copies of kappa_example(1) plus kappa_example(frac(target)):
// hits any nonnegative curvature target exactly.
OperatorSpec kappa_target_sum(double target);

struct CorpusEntry {
  std::string name;
  OperatorSpec spec;
  std::optional<double> exact_k;  // known exact curvature
  std::optional<int> expect_index;
  std::optional<bool> expect_pure;
  bool partial_isometry = false;
  // Whether the r = 0.999 integral check applies: the Abel mean at fixed
  // r differs from K by the unconverged tail (1-r^2) sum r^{2i}(a_i - K);
  // entries are marked only when that tail is provably below the 5e-3
  // acceptance tolerance (strict contractions with slow a_i decay and long
  // nilpotent orbits are excluded by the closed-form bound 1 - r^{2n}).
  bool integral_applicable = false;
};

std::vector<CorpusEntry> default_corpus();
// The partial-isometry subset (dilation / reciprocity checks).
std::vector<CorpusEntry> partial_isometry_corpus();

}  // namespace curvop
