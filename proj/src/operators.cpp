#include "curvop/operators.hpp"

#include <algorithm>
#include <cmath>

#include "curvop/defect.hpp"
#include "curvop/errors.hpp"
#include "curvop/prng.hpp"

namespace curvop {

OperatorSpec OperatorSpec::dense(CMat m) {
  if (m.rows != m.cols || m.rows == 0)
    throw DomainError("dense operator must be square and nonempty");
  return OperatorSpec{Node{DenseOperator{std::move(m)}}};
}

OperatorSpec OperatorSpec::shift(WeightedShiftSpec s) {
  for (const auto& [n, w] : s.overrides) {
    if (s.variant == WeightedShiftSpec::Variant::unilateral && n < 1)
      throw DomainError("unilateral shift override at index < 1");
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw DomainError("shift weight is not finite");
    if (std::abs(w) > 1.0 + kContractionTol)
      throw DomainError("shift weight exceeds modulus 1");
  }
  return OperatorSpec{Node{std::move(s)}};
}

OperatorSpec OperatorSpec::step_shift(int m) {
  if (m < 1) throw DomainError("step shift needs step >= 1");
  return OperatorSpec{Node{StepShiftSpec{m}}};
}

OperatorSpec OperatorSpec::backward_shift() {
  return OperatorSpec{Node{BackwardShiftSpec{}}};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

const VecH::Sparse& sparse_of(const VecH& x, const char* what) {
  const auto* s = std::get_if<VecH::Sparse>(&x.node);
  if (!s) throw DomainError(std::string("expected sparse vector for ") + what);
  return *s;
}

void check_min_index(const VecH::Sparse& s, std::int64_t min_index, const char* what) {
  if (!s.empty() && s.begin()->first < min_index)
    throw DomainError(std::string(what) + ": support below the index domain");
}

}  // namespace

void validate_vector(const OperatorSpec& t, const VecH& x) {
  if (const auto* d = t.get_if<DenseOperator>()) {
    const auto* xd = std::get_if<VecH::Dense>(&x.node);
    if (!xd || xd->size() != d->m.rows)
      throw DomainError("vector does not match dense operator dimension");
  } else if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    const auto& xs = sparse_of(x, "shift operator");
    if (s->variant == WeightedShiftSpec::Variant::unilateral)
      check_min_index(xs, 1, "unilateral shift");
  } else if (t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>()) {
    check_min_index(sparse_of(x, "shift operator"), 1, "unilateral shift");
  } else if (const auto* ds = t.get_if<DirectSumSpec>()) {
    const auto* xp = std::get_if<std::vector<VecH>>(&x.node);
    if (!xp || xp->size() != ds->parts.size())
      throw DomainError("vector does not match direct-sum arity");
    for (std::size_t i = 0; i < xp->size(); ++i) validate_vector(ds->parts[i], (*xp)[i]);
  } else {
    const auto& ext = std::get<ExtensionSpec>(t.node);
    const auto* xe = std::get_if<VecH::Ext>(&x.node);
    if (!xe || xe->defect_coords.size() != static_cast<std::size_t>(ext.inner_defect->rank_T))
      throw DomainError("vector does not match extension layout");
    validate_vector(ext.inner(), xe->inner());
  }
}

// ---------------------------------------------------------------------------
// apply / apply_adjoint
// ---------------------------------------------------------------------------

VecH apply(const OperatorSpec& t, const VecH& x) {
  validate_vector(t, x);
  if (const auto* d = t.get_if<DenseOperator>())
    return VecH::dense(matvec(d->m, std::get<VecH::Dense>(x.node)));

  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    VecH::Sparse out;
    for (const auto& [n, v] : std::get<VecH::Sparse>(x.node)) {
      const cplx w = s->weight(n);
      if (w != cplx{0.0, 0.0}) out[n + 1] += w * v;
    }
    return VecH::sparse(std::move(out));
  }

  if (const auto* p = t.get_if<StepShiftSpec>()) {
    VecH::Sparse out;
    for (const auto& [k, v] : std::get<VecH::Sparse>(x.node)) out[k + p->step] = v;
    return VecH::sparse(std::move(out));
  }

  if (t.is<BackwardShiftSpec>()) {
    VecH::Sparse out;
    for (const auto& [k, v] : std::get<VecH::Sparse>(x.node))
      if (k >= 2) out[k - 1] = v;
    return VecH::sparse(std::move(out));
  }

  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    const auto& xp = std::get<std::vector<VecH>>(x.node);
    std::vector<VecH> out;
    out.reserve(xp.size());
    for (std::size_t i = 0; i < xp.size(); ++i) out.push_back(apply(ds->parts[i], xp[i]));
    return VecH::parts(std::move(out));
  }

  const auto& ext = std::get<ExtensionSpec>(t.node);
  const auto& xe = std::get<VecH::Ext>(x.node);
  // Q(h + x) = (T h + Delta_T x_hat) + 0, with x_hat = sum x_i b_i.
  VecH h_new = apply(ext.inner(), xe.inner());
  const auto& cols = ext.inner_defect->delta_cols_T;
  for (std::size_t i = 0; i < cols.size(); ++i)
    add_scaled(h_new, xe.defect_coords[i], cols[i]);
  return VecH::ext(std::move(h_new),
                   std::vector<cplx>(xe.defect_coords.size(), cplx{0.0, 0.0}));
}

VecH apply_adjoint(const OperatorSpec& t, const VecH& x) {
  validate_vector(t, x);
  if (const auto* d = t.get_if<DenseOperator>())
    return VecH::dense(matvec_adj(d->m, std::get<VecH::Dense>(x.node)));

  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    // (T* x)_n = conj(w_n) x_{n+1}
    const bool unilateral = s->variant == WeightedShiftSpec::Variant::unilateral;
    VecH::Sparse out;
    for (const auto& [k, v] : std::get<VecH::Sparse>(x.node)) {
      const std::int64_t n = k - 1;
      if (unilateral && n < 1) continue;
      const cplx w = s->weight(n);
      if (w != cplx{0.0, 0.0}) out[n] += std::conj(w) * v;
    }
    return VecH::sparse(std::move(out));
  }

  if (const auto* p = t.get_if<StepShiftSpec>()) {
    VecH::Sparse out;
    for (const auto& [k, v] : std::get<VecH::Sparse>(x.node))
      if (k - p->step >= 1) out[k - p->step] = v;
    return VecH::sparse(std::move(out));
  }

  if (t.is<BackwardShiftSpec>()) {  // adjoint of S* is S
    VecH::Sparse out;
    for (const auto& [k, v] : std::get<VecH::Sparse>(x.node)) out[k + 1] = v;
    return VecH::sparse(std::move(out));
  }

  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    const auto& xp = std::get<std::vector<VecH>>(x.node);
    std::vector<VecH> out;
    out.reserve(xp.size());
    for (std::size_t i = 0; i < xp.size(); ++i)
      out.push_back(apply_adjoint(ds->parts[i], xp[i]));
    return VecH::parts(std::move(out));
  }

  const auto& ext = std::get<ExtensionSpec>(t.node);
  const auto& xe = std::get<VecH::Ext>(x.node);
  // Q*(h + x) = T* h + coords(Delta_T h); the defect coordinate i is
  // <Delta_T h, b_i> = <h, Delta_T b_i> by self-adjointness.
  VecH h_new = apply_adjoint(ext.inner(), xe.inner());
  const auto& cols = ext.inner_defect->delta_cols_T;
  std::vector<cplx> coords(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) coords[i] = inner(xe.inner(), cols[i]);
  return VecH::ext(std::move(h_new), std::move(coords));
}

VecH apply_power(const OperatorSpec& t, const VecH& x, int n) {
  if (n < 0) throw DomainError("apply_power: negative exponent");
  if (const auto* p = t.get_if<StepShiftSpec>()) {
    // T^n e_k = e_{k + m n}, in one pass.
    validate_vector(t, x);
    VecH::Sparse out;
    for (const auto& [k, v] : std::get<VecH::Sparse>(x.node))
      out[k + static_cast<std::int64_t>(p->step) * n] = v;
    return VecH::sparse(std::move(out));
  }
  VecH y = x;
  for (int i = 0; i < n; ++i) y = apply(t, y);
  return y;
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double operator_norm(const OperatorSpec& t) {
  if (const auto* d = t.get_if<DenseOperator>()) return spectral_norm(d->m);
  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    double m = 1.0;  // non-override weights are 1
    for (const auto& [n, w] : s->overrides) m = std::max(m, std::abs(w));
    return m;
  }
  if (t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>()) return 1.0;
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    double m = 0.0;
    for (const auto& p : ds->parts) m = std::max(m, operator_norm(p));
    return m;
  }
  // Q Q* is the projection onto the inner space, so ||Q|| = 1.
  return 1.0;
}

bool is_contraction(const OperatorSpec& t, double tol) {
  return operator_norm(t) <= 1.0 + tol;
}

void require_contraction(const OperatorSpec& t, double tol) {
  const double n = operator_norm(t);
  if (n > 1.0 + tol)
    throw ContractionError("operator norm " + std::to_string(n) +
                           " exceeds the contraction bound");
}

OperatorSpec direct_sum(std::vector<OperatorSpec> parts) {
  if (parts.empty()) throw DomainError("direct sum of zero parts");
  return OperatorSpec{OperatorSpec::Node{DirectSumSpec{std::move(parts)}}};
}

// ---------------------------------------------------------------------------
// Densification
// ---------------------------------------------------------------------------

namespace {

std::size_t window_len(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw DomainError("densify: empty window");
  return static_cast<std::size_t>(hi - lo + 1);
}

// Unilateral-type leaves live on indices >= 1; their window is clamped there
// so one window can serve mixed direct sums.
std::int64_t clamp_unilateral(const OperatorSpec& t, std::int64_t lo) {
  const auto* s = t.get_if<WeightedShiftSpec>();
  const bool unilateral =
      (s && s->variant == WeightedShiftSpec::Variant::unilateral) ||
      t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>();
  return unilateral ? std::max<std::int64_t>(lo, 1) : lo;
}

}  // namespace

std::size_t densified_dimension(const OperatorSpec& t, std::int64_t lo, std::int64_t hi) {
  if (const auto* d = t.get_if<DenseOperator>()) return d->m.rows;
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    std::size_t n = 0;
    for (const auto& p : ds->parts) n += densified_dimension(p, lo, hi);
    return n;
  }
  if (const auto* ext = t.get_if<ExtensionSpec>())
    return densified_dimension(ext->inner(), lo, hi) +
           static_cast<std::size_t>(ext->inner_defect->rank_T);
  return window_len(clamp_unilateral(t, lo), hi);
}

std::vector<cplx> flatten_window(const OperatorSpec& t, const VecH& x,
                                 std::int64_t lo, std::int64_t hi) {
  // Coordinates of the compression of x to the densified layout; support
  // outside the window is dropped (that is what compression does).
  if (t.is<DenseOperator>()) return std::get<VecH::Dense>(x.node);
  if (t.is<WeightedShiftSpec>() || t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>()) {
    const std::int64_t wlo = clamp_unilateral(t, lo);
    std::vector<cplx> out(window_len(wlo, hi), cplx{0.0, 0.0});
    for (const auto& [k, v] : std::get<VecH::Sparse>(x.node))
      if (k >= wlo && k <= hi) out[static_cast<std::size_t>(k - wlo)] = v;
    return out;
  }
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    std::vector<cplx> out;
    const auto& xp = std::get<std::vector<VecH>>(x.node);
    for (std::size_t i = 0; i < ds->parts.size(); ++i) {
      auto part = flatten_window(ds->parts[i], xp[i], lo, hi);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  const auto& ext = std::get<ExtensionSpec>(t.node);
  const auto& xe = std::get<VecH::Ext>(x.node);
  std::vector<cplx> out = flatten_window(ext.inner(), xe.inner(), lo, hi);
  out.insert(out.end(), xe.defect_coords.begin(), xe.defect_coords.end());
  return out;
}

CMat densify(const OperatorSpec& t, std::int64_t lo, std::int64_t hi) {
  if (const auto* d = t.get_if<DenseOperator>()) return d->m;

  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    const std::int64_t wlo = clamp_unilateral(t, lo);
    for (const auto& [n, w] : s->overrides)
      if (n < wlo || n + 1 > hi)
        throw DomainError("densify: window excludes a shift override");
    const std::size_t n = window_len(wlo, hi);
    CMat m(n, n);
    for (std::int64_t k = wlo; k < hi; ++k)
      m.at(static_cast<std::size_t>(k + 1 - wlo), static_cast<std::size_t>(k - wlo)) =
          s->weight(k);
    return m;
  }

  if (const auto* p = t.get_if<StepShiftSpec>()) {
    const std::int64_t wlo = clamp_unilateral(t, lo);
    const std::size_t n = window_len(wlo, hi);
    CMat m(n, n);
    for (std::int64_t k = wlo; k + p->step <= hi; ++k)
      m.at(static_cast<std::size_t>(k + p->step - wlo), static_cast<std::size_t>(k - wlo)) = 1.0;
    return m;
  }

  if (t.is<BackwardShiftSpec>()) {
    const std::int64_t wlo = clamp_unilateral(t, lo);
    const std::size_t n = window_len(wlo, hi);
    CMat m(n, n);
    for (std::int64_t k = wlo + 1; k <= hi; ++k)
      m.at(static_cast<std::size_t>(k - 1 - wlo), static_cast<std::size_t>(k - wlo)) = 1.0;
    return m;
  }

  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    std::vector<CMat> blocks;
    std::size_t total = 0;
    for (const auto& p : ds->parts) {
      blocks.push_back(densify(p, lo, hi));
      total += blocks.back().rows;
    }
    CMat m(total, total);
    std::size_t off = 0;
    for (const auto& b : blocks) {
      for (std::size_t i = 0; i < b.rows; ++i)
        for (std::size_t j = 0; j < b.cols; ++j) m.at(off + i, off + j) = b.at(i, j);
      off += b.rows;
    }
    return m;
  }

  const auto& ext = std::get<ExtensionSpec>(t.node);
  const CMat inner = densify(ext.inner(), lo, hi);
  const auto& dd = *ext.inner_defect;
  const std::size_t dim = inner.rows;
  const std::size_t q = static_cast<std::size_t>(dd.rank_T);
  CMat m(dim + q, dim + q);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m.at(i, j) = inner.at(i, j);
  for (std::size_t k = 0; k < q; ++k) {
    const auto col = flatten_window(ext.inner(), dd.delta_cols_T[k], lo, hi);
    // Dropping support here would silently change Q; insist on coverage.
    if (std::abs(norm(dd.delta_cols_T[k]) -
                 std::sqrt(kern::ops().norm2(col.size(), col.data()))) > 1e-12)
      throw DomainError("densify: window excludes part of the defect range");
    for (std::size_t i = 0; i < dim; ++i) m.at(i, dim + k) = col[i];
  }
  return m;
}

bool densify_is_truncation(const OperatorSpec& t) {
  if (t.is<WeightedShiftSpec>() || t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>())
    return true;
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    for (const auto& p : ds->parts)
      if (densify_is_truncation(p)) return true;
    return false;
  }
  if (const auto* ext = t.get_if<ExtensionSpec>()) return densify_is_truncation(ext->inner());
  return false;
}

// ---------------------------------------------------------------------------
// Vector factories / description
// ---------------------------------------------------------------------------

VecH zero_vector(const OperatorSpec& t) {
  if (const auto* d = t.get_if<DenseOperator>())
    return VecH::dense(std::vector<cplx>(d->m.rows, cplx{0.0, 0.0}));
  if (t.is<WeightedShiftSpec>() || t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>())
    return VecH::sparse({});
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    std::vector<VecH> parts;
    parts.reserve(ds->parts.size());
    for (const auto& p : ds->parts) parts.push_back(zero_vector(p));
    return VecH::parts(std::move(parts));
  }
  const auto& ext = std::get<ExtensionSpec>(t.node);
  return VecH::ext(zero_vector(ext.inner()),
                   std::vector<cplx>(static_cast<std::size_t>(ext.inner_defect->rank_T),
                                     cplx{0.0, 0.0}));
}

VecH random_vector(const OperatorSpec& t, SplitMix64& rng) {
  if (const auto* d = t.get_if<DenseOperator>()) {
    std::vector<cplx> c(d->m.rows);
    for (auto& v : c) v = cplx{rng.sym(), rng.sym()};
    return VecH::dense(std::move(c));
  }
  if (t.is<WeightedShiftSpec>() || t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>()) {
    std::int64_t lo = 1, hi = 6;
    if (const auto* s = t.get_if<WeightedShiftSpec>()) {
      if (s->variant == WeightedShiftSpec::Variant::bilateral) { lo = -4; hi = 4; }
      if (!s->overrides.empty()) {
        lo = std::min(lo, s->overrides.begin()->first - 2);
        hi = std::max(hi, s->overrides.rbegin()->first + 2);
      }
    }
    VecH::Sparse out;
    const int nnz = 3 + static_cast<int>(rng.below(3));
    for (int i = 0; i < nnz; ++i) {
      const std::int64_t idx =
          lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
      out[idx] += cplx{rng.sym(), rng.sym()};
    }
    return VecH::sparse(std::move(out));
  }
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    std::vector<VecH> parts;
    parts.reserve(ds->parts.size());
    for (const auto& p : ds->parts) parts.push_back(random_vector(p, rng));
    return VecH::parts(std::move(parts));
  }
  const auto& ext = std::get<ExtensionSpec>(t.node);
  std::vector<cplx> coords(static_cast<std::size_t>(ext.inner_defect->rank_T));
  for (auto& v : coords) v = cplx{rng.sym(), rng.sym()};
  return VecH::ext(random_vector(ext.inner(), rng), std::move(coords));
}

std::string describe(const OperatorSpec& t) {
  if (const auto* d = t.get_if<DenseOperator>())
    return "dense " + std::to_string(d->m.rows) + "x" + std::to_string(d->m.cols);
  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    const char* v =
        s->variant == WeightedShiftSpec::Variant::unilateral ? "unilateral" : "bilateral";
    return std::string(v) + " weighted shift, " + std::to_string(s->overrides.size()) +
           " override(s)";
  }
  if (const auto* p = t.get_if<StepShiftSpec>())
    return "unilateral shift power m=" + std::to_string(p->step);
  if (t.is<BackwardShiftSpec>()) return "backward shift";
  if (const auto* ds = t.get_if<DirectSumSpec>())
    return "direct sum of " + std::to_string(ds->parts.size()) + " part(s)";
  const auto& ext = std::get<ExtensionSpec>(t.node);
  return "partial-isometry extension of [" + describe(ext.inner()) + "]";
}

std::optional<std::size_t> dense_dimension(const OperatorSpec& t) {
  if (const auto* d = t.get_if<DenseOperator>()) return d->m.rows;
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    std::size_t total = 0;
    for (const auto& p : ds->parts) {
      auto d = dense_dimension(p);
      if (!d) return std::nullopt;
      total += *d;
    }
    return total;
  }
  if (const auto* ext = t.get_if<ExtensionSpec>()) {
    auto d = dense_dimension(ext->inner());
    if (!d) return std::nullopt;
    return *d + static_cast<std::size_t>(ext->inner_defect->rank_T);
  }
  return std::nullopt;
}

}  // namespace curvop
