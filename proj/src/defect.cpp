#include "curvop/defect.hpp"

#include <algorithm>
#include <cmath>

#include "curvop/errors.hpp"

namespace curvop {

VecH defect_apply(const DefectOp& d, const VecH& x) {
  if (const auto* dg = std::get_if<DefectOp::Diag>(&d.node)) {
    const auto& xs = std::get<VecH::Sparse>(x.node);
    VecH::Sparse out;
    for (const auto& [n, v] : xs) {
      auto it = dg->entries.find(n);
      if (it != dg->entries.end() && it->second != 0.0) out[n] = it->second * v;
    }
    return VecH::sparse(std::move(out));
  }
  if (const auto* dn = std::get_if<DefectOp::Dense>(&d.node))
    return VecH::dense(matvec(dn->delta, std::get<VecH::Dense>(x.node)));
  if (const auto* pr = std::get_if<DefectOp::Proj>(&d.node)) {
    VecH out = zero_like(x);
    for (const VecH& v : pr->onb) add_scaled(out, inner(x, v), v);
    return out;
  }
  const auto& sum = std::get<DefectOp::Sum>(d.node);
  const auto& xp = std::get<std::vector<VecH>>(x.node);
  if (xp.size() != sum.parts.size()) throw DomainError("defect_apply: arity mismatch");
  std::vector<VecH> out;
  out.reserve(xp.size());
  for (std::size_t i = 0; i < xp.size(); ++i)
    out.push_back(defect_apply(sum.parts[i], xp[i]));
  return VecH::parts(std::move(out));
}

namespace {

struct RankInfo {
  int rank = 0;
  double gap = std::numeric_limits<double>::infinity();
};

RankInfo count_rank(const std::vector<double>& desc_values) {
  RankInfo info;
  if (desc_values.empty()) return info;
  const double top = std::max(desc_values.front(), 0.0);
  const double thr = std::max(kRankRelTol * top, kRankAbsFloor);
  while (info.rank < static_cast<int>(desc_values.size()) &&
         desc_values[static_cast<std::size_t>(info.rank)] >= thr)
    ++info.rank;
  if (info.rank > 0 && info.rank < static_cast<int>(desc_values.size())) {
    const double rejected = std::max(desc_values[static_cast<std::size_t>(info.rank)], 0.0);
    if (rejected > 0.0)
      info.gap = desc_values[static_cast<std::size_t>(info.rank - 1)] / rejected;
  }
  return info;
}

struct DenseDefectSide {
  DefectOp op;
  std::vector<VecH> basis;
  std::vector<double> values;  // clamped eigenvalues of the accepted basis
  RankInfo rank;
  double clamp_floor = 0.0;
};

// Clamped Hermitian square root of gram = 1 - TT* (or 1 - T*T).
DenseDefectSide dense_defect_side(const CMat& gram) {
  DenseDefectSide side;
  HermEig eig = hermitian_eig(gram);
  side.clamp_floor = eig.values.empty() ? 0.0 : eig.values.back();
  std::vector<double> clamped = eig.values;
  for (double& v : clamped) v = (v < kEigClamp) ? 0.0 : v;
  side.rank = count_rank(clamped);

  const std::size_t n = gram.rows;
  CMat delta(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sqrt(clamped[k]);
    if (s == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        delta.at(i, j) += s * eig.vectors.at(i, k) * std::conj(eig.vectors.at(j, k));
  }
  side.op = DefectOp{DefectOp::Dense{std::move(delta)}};
  for (int k = 0; k < side.rank.rank; ++k) {
    std::vector<cplx> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = eig.vectors.at(i, static_cast<std::size_t>(k));
    side.basis.push_back(VecH::dense(std::move(col)));
    side.values.push_back(clamped[static_cast<std::size_t>(k)]);
  }
  return side;
}

// Diagonal entries of 1 - TT* / 1 - T*T for a weighted shift.
struct ShiftDiag {
  std::map<std::int64_t, double> d_T;      // slot -> eigenvalue of 1-TT*
  std::map<std::int64_t, double> d_Tstar;  // slot -> eigenvalue of 1-T*T
};

ShiftDiag shift_defect_diag(const WeightedShiftSpec& s) {
  ShiftDiag out;
  if (s.variant == WeightedShiftSpec::Variant::unilateral) out.d_T[1] = 1.0;
  for (const auto& [n, w] : s.overrides) {
    const double d = 1.0 - std::norm(w);
    if (d > 0.0) {
      out.d_T[n + 1] = d;  // (1-TT*) e_{n+1} = (1-|w_n|^2) e_{n+1}
      out.d_Tstar[n] = d;  // (1-T*T) e_n = (1-|w_n|^2) e_n
    }
  }
  return out;
}

RankInfo diag_rank(const std::map<std::int64_t, double>& d) {
  std::vector<double> vals;
  vals.reserve(d.size());
  for (const auto& [n, v] : d) vals.push_back(v);
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  return count_rank(vals);
}

// Keep only diagonal entries above the rank threshold; the survivors are the
// defect slots.
std::map<std::int64_t, double> thresholded(const std::map<std::int64_t, double>& d) {
  double top = 0.0;
  for (const auto& [n, v] : d) top = std::max(top, v);
  const double thr = std::max(kRankRelTol * top, kRankAbsFloor);
  std::map<std::int64_t, double> out;
  for (const auto& [n, v] : d)
    if (v >= thr) out[n] = v;
  return out;
}

void diag_side(const std::map<std::int64_t, double>& d, DefectOp& op,
               std::vector<VecH>& basis, std::vector<double>& values) {
  DefectOp::Diag diag;
  for (const auto& [n, v] : d) {
    diag.entries[n] = std::sqrt(v);
    basis.push_back(VecH::unit(n));
    values.push_back(v);
  }
  op = DefectOp{std::move(diag)};
}

}  // namespace

DefectData defect(const OperatorSpec& t) {
  require_contraction(t);
  DefectData dd;
  std::vector<double> values_T;  // eigenvalues matching basis_T order

  if (const auto* d = t.get_if<DenseOperator>()) {
    const CMat id = CMat::identity(d->m.rows);
    DenseDefectSide left = dense_defect_side(id - matmul(d->m, adjoint(d->m)));
    DenseDefectSide right = dense_defect_side(id - matmul(adjoint(d->m), d->m));
    dd.delta_T = std::move(left.op);
    dd.delta_Tstar = std::move(right.op);
    dd.rank_T = left.rank.rank;
    dd.rank_Tstar = right.rank.rank;
    dd.gap_T = left.rank.gap;
    dd.gap_Tstar = right.rank.gap;
    dd.clamp_floor = std::min(left.clamp_floor, right.clamp_floor);
    dd.basis_T = std::move(left.basis);
    dd.basis_Tstar = std::move(right.basis);
    values_T = std::move(left.values);
  } else if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    const ShiftDiag diag = shift_defect_diag(*s);
    const auto dT = thresholded(diag.d_T);
    const auto dTs = thresholded(diag.d_Tstar);
    dd.rank_T = diag_rank(diag.d_T).rank;
    dd.rank_Tstar = diag_rank(diag.d_Tstar).rank;
    dd.gap_T = diag_rank(diag.d_T).gap;
    dd.gap_Tstar = diag_rank(diag.d_Tstar).gap;
    std::vector<double> dummy;
    diag_side(dT, dd.delta_T, dd.basis_T, values_T);
    diag_side(dTs, dd.delta_Tstar, dd.basis_Tstar, dummy);
  } else if (const auto* p = t.get_if<StepShiftSpec>()) {
    // 1 - TT* is the projection onto e_1..e_m; 1 - T*T = 0 (isometry).
    std::map<std::int64_t, double> dT;
    for (int k = 1; k <= p->step; ++k) dT[k] = 1.0;
    std::vector<double> dummy;
    diag_side(dT, dd.delta_T, dd.basis_T, values_T);
    diag_side({}, dd.delta_Tstar, dd.basis_Tstar, dummy);
    dd.rank_T = p->step;
    dd.rank_Tstar = 0;
  } else if (t.is<BackwardShiftSpec>()) {
    // S* is a coisometry: 1 - (S*)(S*)* = 1 - S*S = 0; 1 - S S* = P_{e_1}.
    std::vector<double> dummy;
    diag_side({}, dd.delta_T, dd.basis_T, values_T);
    diag_side({{1, 1.0}}, dd.delta_Tstar, dd.basis_Tstar, dummy);
    dd.rank_T = 0;
    dd.rank_Tstar = 1;
  } else if (const auto* ds = t.get_if<DirectSumSpec>()) {
    DefectOp::Sum sum_T, sum_Ts;
    const std::size_t nparts = ds->parts.size();
    std::vector<DefectData> parts;
    parts.reserve(nparts);
    for (const auto& p : ds->parts) parts.push_back(defect(p));
    auto embed = [&](std::size_t which, const VecH& v) {
      std::vector<VecH> slots;
      slots.reserve(nparts);
      for (std::size_t j = 0; j < nparts; ++j)
        slots.push_back(j == which ? v : zero_vector(ds->parts[j]));
      return VecH::parts(std::move(slots));
    };
    for (std::size_t i = 0; i < nparts; ++i) {
      DefectData& pd = parts[i];
      sum_T.parts.push_back(std::move(pd.delta_T));
      sum_Ts.parts.push_back(std::move(pd.delta_Tstar));
      dd.rank_T += pd.rank_T;
      dd.rank_Tstar += pd.rank_Tstar;
      dd.gap_T = std::min(dd.gap_T, pd.gap_T);
      dd.gap_Tstar = std::min(dd.gap_Tstar, pd.gap_Tstar);
      dd.clamp_floor = std::min(dd.clamp_floor, pd.clamp_floor);
      for (const VecH& b : pd.basis_T) dd.basis_T.push_back(embed(i, b));
      for (const VecH& b : pd.basis_Tstar) dd.basis_Tstar.push_back(embed(i, b));
      for (const VecH& c : pd.delta_cols_T) dd.delta_cols_T.push_back(embed(i, c));
    }
    dd.delta_T = DefectOp{std::move(sum_T)};
    dd.delta_Tstar = DefectOp{std::move(sum_Ts)};
    return dd;
  } else {
    // Extension Q = [[T, D_T],[0,0]].  Both defects are exact projections:
    //   1 - QQ* projects onto the adjoined defect summand,
    //   1 - Q*Q projects onto ker Q = W range(Delta_T*),  W = [Delta_T*; -T].
    const auto& ext = std::get<ExtensionSpec>(t.node);
    const DefectData& in = *ext.inner_defect;
    const std::size_t q = static_cast<std::size_t>(in.rank_T);
    DefectOp::Proj proj_T, proj_Ts;
    for (std::size_t k = 0; k < q; ++k) {
      std::vector<cplx> coords(q, cplx{0.0, 0.0});
      coords[k] = 1.0;
      proj_T.onb.push_back(VecH::ext(zero_vector(ext.inner()), std::move(coords)));
    }
    for (const VecH& u : in.basis_Tstar) {
      VecH top = defect_apply(in.delta_Tstar, u);
      VecH tu = apply(ext.inner(), u);
      std::vector<cplx> coords(q);
      for (std::size_t k = 0; k < q; ++k) coords[k] = -inner(tu, in.basis_T[k]);
      proj_Ts.onb.push_back(VecH::ext(std::move(top), std::move(coords)));
    }
    dd.rank_T = in.rank_T;
    dd.rank_Tstar = in.rank_Tstar;
    dd.basis_T = proj_T.onb;
    dd.basis_Tstar = proj_Ts.onb;
    dd.delta_cols_T = proj_T.onb;  // Delta_Q b = b on its range (projection)
    dd.delta_T = DefectOp{std::move(proj_T)};
    dd.delta_Tstar = DefectOp{std::move(proj_Ts)};
    return dd;
  }

  // Defect columns Delta_T b_k = sqrt(lambda_k) b_k.
  dd.delta_cols_T.reserve(dd.basis_T.size());
  for (std::size_t k = 0; k < dd.basis_T.size(); ++k) {
    VecH c = dd.basis_T[k];
    scale(c, cplx{std::sqrt(values_T[k]), 0.0});
    dd.delta_cols_T.push_back(std::move(c));
  }
  return dd;
}

OperatorSpec extend_to_partial_isometry(const OperatorSpec& t) {
  auto dd = std::make_shared<const DefectData>(defect(t));
  ExtensionSpec ext;
  ext.inner_box.push_back(t);
  ext.inner_defect = std::move(dd);
  return OperatorSpec{OperatorSpec::Node{std::move(ext)}};
}

CMat assemble_extension_dense(const CMat& t) {
  const std::size_t n = t.rows;
  DenseDefectSide side = dense_defect_side(CMat::identity(n) - matmul(t, adjoint(t)));
  const std::size_t q = static_cast<std::size_t>(side.rank.rank);
  CMat qmat(n + q, n + q);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) qmat.at(i, j) = t.at(i, j);
  for (std::size_t k = 0; k < q; ++k) {
    const auto& b = std::get<VecH::Dense>(side.basis[k].node);
    const double s = std::sqrt(side.values[k]);
    for (std::size_t i = 0; i < n; ++i) qmat.at(i, n + k) = s * b[i];
  }
  return qmat;
}

namespace {

// Bounding indices of the "interesting" slots of shift leaves (overrides and
// bottom defect slots); nullopt when the operator has no shift leaf.
std::optional<std::pair<std::int64_t, std::int64_t>> shift_leaf_bounds(const OperatorSpec& t) {
  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    std::int64_t lo, hi;
    if (s->variant == WeightedShiftSpec::Variant::unilateral) {
      lo = 1;
      hi = s->overrides.empty() ? 2 : s->overrides.rbegin()->first + 1;
    } else {
      lo = s->overrides.empty() ? 0 : std::min<std::int64_t>(0, s->overrides.begin()->first);
      hi = s->overrides.empty() ? 1 : std::max<std::int64_t>(1, s->overrides.rbegin()->first + 1);
    }
    return std::make_pair(lo, hi);
  }
  if (const auto* p = t.get_if<StepShiftSpec>())
    return std::make_pair<std::int64_t, std::int64_t>(1, p->step + 1);
  if (t.is<BackwardShiftSpec>()) return std::make_pair<std::int64_t, std::int64_t>(1, 2);
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    std::optional<std::pair<std::int64_t, std::int64_t>> acc;
    for (const auto& p : ds->parts)
      if (auto b = shift_leaf_bounds(p)) {
        if (!acc) acc = b;
        else acc = std::make_pair(std::min(acc->first, b->first), std::max(acc->second, b->second));
      }
    return acc;
  }
  if (const auto* ext = t.get_if<ExtensionSpec>()) return shift_leaf_bounds(ext->inner());
  return std::nullopt;
}

}  // namespace

std::optional<std::pair<std::int64_t, std::int64_t>> shift_window_bounds(const OperatorSpec& t) {
  return shift_leaf_bounds(t);
}

Prop1RankReport prop1_rank_check(const OperatorSpec& t) {
  require_contraction(t);
  CMat a;
  if (const auto* d = t.get_if<DenseOperator>()) {
    a = d->m;
  } else if (auto bounds = shift_leaf_bounds(t)) {
    // Windowed compression; unilateral leaves clamp the left edge at 1.
    a = densify(t, bounds->first - 8, bounds->second + 8);
  } else {
    a = densify(t, 0, 0);  // dense composites ignore the window
  }

  const CMat id_a = CMat::identity(a.rows);
  DenseDefectSide left = dense_defect_side(id_a - matmul(a, adjoint(a)));
  DenseDefectSide right = dense_defect_side(id_a - matmul(adjoint(a), a));

  const CMat q = assemble_extension_dense(a);
  const CMat id_q = CMat::identity(q.rows);
  DenseDefectSide q_left = dense_defect_side(id_q - matmul(q, adjoint(q)));
  DenseDefectSide q_right = dense_defect_side(id_q - matmul(adjoint(q), q));

  Prop1RankReport rep;
  rep.rank_T = left.rank.rank;
  rep.rank_Tstar = right.rank.rank;
  rep.rank_Q = q_left.rank.rank;
  rep.rank_Qstar = q_right.rank.rank;
  rep.coker_rank_equal = rep.rank_Q == rep.rank_T;
  rep.ker_rank_equal = rep.rank_Qstar == rep.rank_Tstar;
  rep.margin_Q = q_left.rank.gap;
  rep.margin_Qstar = q_right.rank.gap;
  return rep;
}

bool is_partial_isometry(const OperatorSpec& t, double tol) {
  if (const auto* d = t.get_if<DenseOperator>()) {
    const CMat ttt = matmul(d->m, matmul(adjoint(d->m), d->m));
    return spectral_norm(ttt - d->m) <= tol;
  }
  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    // T T* T e_n = |w_n|^2 w_n e_{n+1}: partial isometry iff every weight has
    // modulus 0 or 1.
    for (const auto& [n, w] : s->overrides)
      if (std::abs(w) * std::abs(1.0 - std::norm(w)) > tol) return false;
    return true;
  }
  if (t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>()) return true;
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    for (const auto& p : ds->parts)
      if (!is_partial_isometry(p, tol)) return false;
    return true;
  }
  return true;  // extensions are partial isometries by construction
}

}  // namespace curvop
