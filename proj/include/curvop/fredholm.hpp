#pragma once

#include <optional>
#include <utility>

#include "curvop/curvature.hpp"

namespace curvop {

// T*^n -> 0 strongly.  In finite dimension this is spectral_radius < 1; the
// band (1 - kSpectralTol, 1] is reported as "not pure" with the borderline
// flag so an integer verdict never flips silently on roundoff.
inline constexpr double kSpectralTol = 1e-10;

struct PurityReport {
  bool pure = false;
  bool borderline = false;
  // Dense route only; NaN for shift-type operators (their verdicts are
  // closed-form and a spectral radius of 1 would say nothing).
  double spectral_radius = std::numeric_limits<double>::quiet_NaN();
};

PurityReport purity_report(const OperatorSpec& t);
bool purity_test(const OperatorSpec& t);

// (dim ker, dim coker).  Dense: singular values below the rank threshold on
// T and T*.  Shifts: closed forms (unilateral: (#zero weights, 1 + #zero
// weights); bilateral: equal counts).  Extensions: the partial-isometry rank
// identities.
std::pair<int, int> kernel_dims(const OperatorSpec& t);

// Smallest singular value above the rank threshold (dense path).
double closed_range_gap(const DenseOperator& t);
// Same quantity through the closed forms available per variant.
double sigma_gap(const OperatorSpec& t);

struct IndexReport {
  int dim_ker = 0;
  int dim_coker = 0;
  int index = 0;  // dim_ker - dim_coker
  double sigma_gap = 0.0;
  bool is_fredholm = false;
  bool is_pure = false;
  bool purity_borderline = false;
  double spectral_radius = std::numeric_limits<double>::quiet_NaN();
  int rank_T = 0;
  int rank_Tstar = 0;
  double curvature = 0.0;  // limit estimate backing the verdict
  bool curvature_converged = false;
  bool theorem4_applicable = false;            // pure with finite defect rank
  std::optional<bool> theorem4_holds;          // set only when applicable
};

// Full verdict: when pure, checks K = rank(1-TT*) - rank(1-T*T) = -index
// within 1e-8; when not pure, everything is still reported so the
// counterexamples stay visible.
IndexReport theorem4_verdict(const OperatorContext& ctx);

}  // namespace curvop
