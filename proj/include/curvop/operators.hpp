#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "curvop/cmat.hpp"
#include "curvop/vech.hpp"

namespace curvop {

struct DefectData;  // defect.hpp

// Tolerance on sigma_max beyond which an operator is rejected as a
// contraction.  Operators beyond it must be normalized explicitly (CLI);
// silent rescaling would corrupt curvature values.
inline constexpr double kContractionTol = 1e-9;

// Dense square operator; column j is the image of e_j.
struct DenseOperator {
  CMat m;
};

// Weighted shift T e_n = w_n e_{n+1} with finitely many non-unit weights.
// Bilateral indices range over all integers; unilateral indices start at 1.
// The finite override map is what keeps every defect and tail product in the
// rest of the library finite and exact.
struct WeightedShiftSpec {
  enum class Variant { unilateral, bilateral };
  Variant variant = Variant::unilateral;
  std::map<std::int64_t, cplx> overrides;

  cplx weight(std::int64_t n) const {
    auto it = overrides.find(n);
    return it == overrides.end() ? cplx{1.0, 0.0} : it->second;
  }
};

// m-step unilateral shift T e_k = e_{k+m} (unit weights).  Kept as its own
// variant so T^n e_k = e_{k+mn} is applied in one step, exactly.
struct StepShiftSpec {
  int step = 1;
};

// Backward shift S* on the unilateral space: e_1 -> 0, e_k -> e_{k-1}.
struct BackwardShiftSpec {};

struct OperatorSpec;

struct DirectSumSpec {
  std::vector<OperatorSpec> parts;
};

// Partial-isometry extension Q = [[T, D_T],[0, 0]] on H + range(1 - TT*).
// The inner defect data is computed once at construction and shared.
struct ExtensionSpec {
  std::vector<OperatorSpec> inner_box;  // exactly one element
  std::shared_ptr<const DefectData> inner_defect;

  OperatorSpec& inner() { return inner_box.front(); }
  const OperatorSpec& inner() const { return inner_box.front(); }
};

struct OperatorSpec {
  using Node = std::variant<DenseOperator, WeightedShiftSpec, StepShiftSpec,
                            BackwardShiftSpec, DirectSumSpec, ExtensionSpec>;
  Node node;

  OperatorSpec() : node(WeightedShiftSpec{}) {}
  explicit OperatorSpec(Node n) : node(std::move(n)) {}

  static OperatorSpec dense(CMat m);
  static OperatorSpec shift(WeightedShiftSpec s);
  static OperatorSpec step_shift(int m);
  static OperatorSpec backward_shift();

  template <class T> const T* get_if() const { return std::get_if<T>(&node); }
  template <class T> bool is() const { return std::holds_alternative<T>(node); }
};

// ---- Core operations --------------------------------------------------------

VecH apply(const OperatorSpec& t, const VecH& x);
VecH apply_adjoint(const OperatorSpec& t, const VecH& x);
VecH apply_power(const OperatorSpec& t, const VecH& x, int n);  // T^n x, n >= 0

double operator_norm(const OperatorSpec& t);
bool is_contraction(const OperatorSpec& t, double tol = kContractionTol);
void require_contraction(const OperatorSpec& t, double tol = kContractionTol);

OperatorSpec direct_sum(std::vector<OperatorSpec> parts);  // DomainError if empty

// Compression of T to span{e_lo..e_hi} for shift-type operators; dense
// operators return themselves.  This is a truncation for shift variants --
// check densify_is_truncation before trusting long orbits near the window
// boundary.  A window that excludes an override (or a defect slot) is a
// DomainError.
CMat densify(const OperatorSpec& t, std::int64_t lo, std::int64_t hi);
bool densify_is_truncation(const OperatorSpec& t);
// Coordinates of the compression of x in densify(t, lo, hi)'s layout.
std::vector<cplx> flatten_window(const OperatorSpec& t, const VecH& x,
                                 std::int64_t lo, std::int64_t hi);
std::size_t densified_dimension(const OperatorSpec& t, std::int64_t lo, std::int64_t hi);

// Zero vector in the space T acts on (shift parts start with empty support).
VecH zero_vector(const OperatorSpec& t);
// Random finitely supported vector for test families; dense coords filled,
// shift parts supported near the overrides.
VecH random_vector(const OperatorSpec& t, struct SplitMix64& rng);

// Shape/domain validation for x against T's space (unilateral supports must
// stay at indices >= 1, dense lengths must match, ...).  DomainError on
// mismatch; used by apply/apply_adjoint.
void validate_vector(const OperatorSpec& t, const VecH& x);

std::string describe(const OperatorSpec& t);
// Total dense dimension when every part is dense/extension-of-dense.
std::optional<std::size_t> dense_dimension(const OperatorSpec& t);

}  // namespace curvop
