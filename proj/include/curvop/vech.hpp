#pragma once

#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "curvop/kernels.hpp"

namespace curvop {

// Finitely supported vector, shaped like the operator it belongs to:
//   - dense part:      coefficient array
//   - shift part:      finite map index -> coefficient
//   - direct sum:      one VecH per part
//   - extension part:  inner H-vector plus coordinates over the defect basis
struct VecH {
  using Dense = std::vector<cplx>;
  using Sparse = std::map<std::int64_t, cplx>;
  struct Ext {
    std::vector<VecH> inner_box;      // exactly one element
    std::vector<cplx> defect_coords;

    VecH& inner() { return inner_box.front(); }
    const VecH& inner() const { return inner_box.front(); }
  };
  using Node = std::variant<Dense, Sparse, std::vector<VecH>, Ext>;

  Node node;

  VecH() : node(Sparse{}) {}
  explicit VecH(Node n) : node(std::move(n)) {}

  static VecH dense(std::vector<cplx> coeffs) { return VecH{Node{std::move(coeffs)}}; }
  static VecH sparse(Sparse entries) { return VecH{Node{std::move(entries)}}; }
  static VecH parts(std::vector<VecH> p) { return VecH{Node{std::move(p)}}; }
  static VecH ext(VecH inner, std::vector<cplx> defect) {
    Ext e;
    e.inner_box.push_back(std::move(inner));
    e.defect_coords = std::move(defect);
    return VecH{Node{std::move(e)}};
  }
  // Basis vector e_index of a shift-type space.
  static VecH unit(std::int64_t index) { return sparse({{index, cplx{1.0, 0.0}}}); }
};

// y += a * x.  Shapes must match (DomainError otherwise).
void add_scaled(VecH& y, cplx a, const VecH& x);
void scale(VecH& x, cplx a);
// <x, y> = sum x_i * conj(y_i)
cplx inner(const VecH& x, const VecH& y);
double norm2(const VecH& x);
double norm(const VecH& x);
bool same_shape(const VecH& x, const VecH& y);
VecH zero_like(const VecH& x);
// Drop exact-zero sparse entries so supports stay tight.
void prune_zeros(VecH& x);
bool all_finite(const VecH& x);

}  // namespace curvop
