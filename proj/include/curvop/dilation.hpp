#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "curvop/curvature.hpp"
#include "curvop/prng.hpp"

namespace curvop {

// Finitely supported element of the dilation space
//   K = ... + D_T H + D_T H + H + D_T* H + D_T* H + ...
// Slot 0 holds an H-vector; slots < 0 hold vectors in range(Delta_T); slots
// > 0 hold vectors in range(Delta_T*).  All slot contents are H-vectors with
// a range-membership invariant.
struct DilationVector {
  std::map<int, VecH> slots;
};

DilationVector embed_h(const OperatorContext& ctx, VecH h);  // slot 0
VecH slot_or_zero(const OperatorContext& ctx, const DilationVector& v, int slot);
void dvec_add_scaled(DilationVector& y, cplx a, const DilationVector& x);
cplx dvec_inner(const DilationVector& x, const DilationVector& y);
double dvec_norm2(const DilationVector& x);
double dvec_norm(const DilationVector& x);

// DomainError when a slot's content is not in its range space (checked
// against the defect bases; exact for shift-type operators).
void validate_dilation_vector(const OperatorContext& ctx, const DilationVector& v);

// The minimal unitary dilation acting one step:
//   U(..., b1, b0, [h], a0, ...) = (..., b1, [Th + D_T b0], -T* b0 + D_T* h, a0, ...)
// U* comes from the adjoint of the local block [[T, D_T],[D_T*, -T*]]; the
// unitarity property test is its acceptance gate.
DilationVector dilation_apply(const OperatorContext& ctx, const DilationVector& v,
                              bool validate = true);
DilationVector dilation_apply_adjoint(const OperatorContext& ctx, const DilationVector& v,
                                      bool validate = true);

// max over n <= n_max and sampled h of || slot0(U^n h) - T^n h ||.
double compression_check(const OperatorContext& ctx, int n_max, int samples = 5,
                         std::uint64_t seed = 2024);

struct WanderingSubspace {
  enum class Label { L, Lstar };
  Label label = Label::L;
  std::vector<DilationVector> basis;  // orthonormal
};

// L = (U - T)H: the slot-1 copy of range(Delta_T*).
// L* = (U* - T*)H: the slot-(-1) copy of range(Delta_T).
// For partial isometries additionally verifies U L* lies inside H (slot 0).
std::pair<WanderingSubspace, WanderingSubspace> wandering_spaces(const OperatorContext& ctx);

// A_m = sum_{n=-m..m} sum_{f in from, g in to} |<U^n f, g>|^2, the partial
// sums of the affinity tr(P_to P_{M(from)}).  Monotone nondecreasing.
struct AffinitySum {
  std::vector<double> partials;  // partials[m] = A_m
  double value() const { return partials.empty() ? 0.0 : partials.back(); }
};
AffinitySum affinity_partial_sum(const OperatorContext& ctx, const WanderingSubspace& from,
                                 const WanderingSubspace& to, int horizon);

// tr(P_L P_{M(L')}) = tr(P_{L'} P_{M(L)}), both sides as affinity partial
// sums at the same horizon, with the last increments as convergence evidence.
struct ReciprocityReport {
  double forward = 0.0;   // tr(P_L P_{M(L*)}) partial sum
  double backward = 0.0;  // tr(P_L* P_{M(L)}) partial sum
  double gap = 0.0;
  double last_increment_forward = 0.0;
  double last_increment_backward = 0.0;
  bool monotone = false;
  bool pass = false;
  double tol = 0.0;
};
ReciprocityReport reciprocity_check(const OperatorContext& ctx, int horizon, double tol = 1e-6);

// K(Q) = q - tr(P_{M(L)} P_{U L*}) for a partial isometry Q with defect rank
// q; the partial sums decrease monotonically to K(Q).  PreconditionError on
// non partial isometries (extend first).  The derivation runs through the
// partial-isometry facts only, so this is computed for non-pure inputs too
// and flagged.
struct DilationCurvature {
  double value = 0.0;
  double affinity = 0.0;
  int q = 0;
  int horizon = 0;
  bool pure_hypothesis = false;  // informational: the integer-value statement assumes purity
};
DilationCurvature curvature_via_dilation(const OperatorContext& ctx, int horizon);

}  // namespace curvop
