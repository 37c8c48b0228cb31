#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <variant>
#include <vector>

#include "curvop/operators.hpp"

namespace curvop {

// Defect conventions follow the source material for this problem family:
//   Delta_T  = sqrt(1 - T T*),   Delta_T* = sqrt(1 - T* T)
// (note the swap relative to much of the operator-theory literature).

inline constexpr double kEigClamp = 1e-12;     // negative-eigenvalue clamp
inline constexpr double kRankRelTol = 1e-9;    // rank threshold, relative
inline constexpr double kRankAbsFloor = 1e-12; // rank threshold, absolute floor

// A defect operator, in whichever exact or dense form the operator variant
// admits.
struct DefectOp {
  struct Diag {  // Delta e_n = entries[n] e_n; exact for shifts
    std::map<std::int64_t, double> entries;
  };
  struct Dense {  // full Hermitian matrix (clamped square root)
    CMat delta;
  };
  struct Proj {  // orthogonal projection onto span(onb); extension defects
    std::vector<VecH> onb;
  };
  struct Sum {  // direct sums act partwise
    std::vector<DefectOp> parts;
  };
  std::variant<Diag, Dense, Proj, Sum> node;
};

VecH defect_apply(const DefectOp& d, const VecH& x);

struct DefectData {
  DefectOp delta_T;      // sqrt(1 - TT*)
  DefectOp delta_Tstar;  // sqrt(1 - T*T)
  int rank_T = 0;
  int rank_Tstar = 0;
  std::vector<VecH> basis_T;       // ONB of range(Delta_T)
  std::vector<VecH> basis_Tstar;   // ONB of range(Delta_T*)
  std::vector<VecH> delta_cols_T;  // Delta_T basis_T[k]; the defect columns
                                   // every curvature iteration starts from
  // Diagnostics (dense paths): most negative eigenvalue seen before clamping
  // and the spectral gap around the rank threshold (min accepted / max
  // rejected; +inf when nothing was rejected or nothing accepted).
  double clamp_floor = 0.0;
  double gap_T = std::numeric_limits<double>::infinity();
  double gap_Tstar = std::numeric_limits<double>::infinity();
};

// Computes both defect operators, their ranks and range bases.
// Dense path: Hermitian eigendecomposition of 1-TT* / 1-T*T with negative
// eigenvalues clamped at kEigClamp, rank counted at the relative threshold.
// Shift path: exact diagonal formulas.  ContractionError if T is not a
// contraction.
DefectData defect(const OperatorSpec& t);

// Q = [[T, Delta_T],[0,0]] on H + range(1-TT*): a partial isometry with the
// same curvature and the same defect ranks as T.
OperatorSpec extend_to_partial_isometry(const OperatorSpec& t);

// rank(1-QQ*) = rank(1-TT*) and rank(1-Q*Q) = rank(1-T*T), verified on an
// independently assembled dense Q (shift-type inputs are densified over a
// window first; both sides of each equality then refer to the same windowed
// operator).
struct Prop1RankReport {
  int rank_T = 0, rank_Tstar = 0;    // of the (densified) base operator
  int rank_Q = 0, rank_Qstar = 0;    // of the assembled Q, numerically
  bool coker_rank_equal = false;     // rank(1-QQ*) == rank(1-TT*)
  bool ker_rank_equal = false;       // rank(1-Q*Q) == rank(1-T*T)
  double margin_Q = 0.0;             // spectral gap ratios at the threshold
  double margin_Qstar = 0.0;
};
Prop1RankReport prop1_rank_check(const OperatorSpec& t);

// || T T* T - T || <= tol; exact matrix norm on the dense path, exact weight
// conditions for shifts.
bool is_partial_isometry(const OperatorSpec& t, double tol = 1e-10);

// Dense assembly of Q for a dense base matrix (used by checks and tests).
CMat assemble_extension_dense(const CMat& t);

// Bounding indices of the overrides / bottom defect slots across the shift
// leaves of t; nullopt when t has no shift leaf.  Callers add their own
// margins before densifying.
std::optional<std::pair<std::int64_t, std::int64_t>> shift_window_bounds(const OperatorSpec& t);

}  // namespace curvop
