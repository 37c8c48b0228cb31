#include "curvop/dilation.hpp"

#include <algorithm>
#include <cmath>

#include "curvop/errors.hpp"
#include "curvop/fredholm.hpp"

namespace curvop {

DilationVector embed_h(const OperatorContext& ctx, VecH h) {
  validate_vector(ctx.op, h);
  DilationVector v;
  v.slots.emplace(0, std::move(h));
  return v;
}

VecH slot_or_zero(const OperatorContext& ctx, const DilationVector& v, int slot) {
  auto it = v.slots.find(slot);
  if (it != v.slots.end()) return it->second;
  return zero_vector(ctx.op);
}

void dvec_add_scaled(DilationVector& y, cplx a, const DilationVector& x) {
  if (a == cplx{0.0, 0.0}) return;
  for (const auto& [slot, vec] : x.slots) {
    auto it = y.slots.find(slot);
    if (it == y.slots.end()) {
      VecH copy = vec;
      scale(copy, a);
      y.slots.emplace(slot, std::move(copy));
    } else {
      add_scaled(it->second, a, vec);
    }
  }
}

cplx dvec_inner(const DilationVector& x, const DilationVector& y) {
  cplx acc{0.0, 0.0};
  if (x.slots.size() <= y.slots.size()) {
    for (const auto& [slot, vec] : x.slots) {
      auto it = y.slots.find(slot);
      if (it != y.slots.end()) acc += inner(vec, it->second);
    }
  } else {
    for (const auto& [slot, vec] : y.slots) {
      auto it = x.slots.find(slot);
      if (it != x.slots.end()) acc += inner(it->second, vec);
    }
  }
  return acc;
}

double dvec_norm2(const DilationVector& x) {
  double acc = 0.0;
  for (const auto& [slot, vec] : x.slots) acc += norm2(vec);
  return acc;
}

double dvec_norm(const DilationVector& x) { return std::sqrt(dvec_norm2(x)); }

namespace {

void drop_zero_slots(DilationVector& v) {
  for (auto it = v.slots.begin(); it != v.slots.end();) {
    prune_zeros(it->second);
    it = (norm2(it->second) == 0.0) ? v.slots.erase(it) : std::next(it);
  }
}

// || x - P_span(basis) x || <= tol * ||x||, i.e. membership in the range
// space spanned by an orthonormal basis.
bool in_span(const std::vector<VecH>& basis, const VecH& x) {
  const double n2 = norm2(x);
  if (n2 == 0.0) return true;
  VecH resid = x;
  for (const VecH& b : basis) add_scaled(resid, -inner(x, b), b);
  return norm2(resid) <= 1e-20 * n2 + 1e-24;
}

}  // namespace

void validate_dilation_vector(const OperatorContext& ctx, const DilationVector& v) {
  for (const auto& [slot, vec] : v.slots) {
    validate_vector(ctx.op, vec);
    if (slot < 0 && !in_span(ctx.dd.basis_T, vec))
      throw DomainError("dilation vector: slot " + std::to_string(slot) +
                        " is not in range(Delta_T)");
    if (slot > 0 && !in_span(ctx.dd.basis_Tstar, vec))
      throw DomainError("dilation vector: slot " + std::to_string(slot) +
                        " is not in range(Delta_T*)");
  }
}

DilationVector dilation_apply(const OperatorContext& ctx, const DilationVector& v,
                              bool validate) {
  if (validate) validate_dilation_vector(ctx, v);
  DilationVector out;
  const VecH h = slot_or_zero(ctx, v, 0);
  const VecH b0 = slot_or_zero(ctx, v, -1);

  VecH new_h = apply(ctx.op, h);
  add_scaled(new_h, cplx{1.0, 0.0}, defect_apply(ctx.dd.delta_T, b0));
  out.slots.emplace(0, std::move(new_h));

  VecH new_a0 = defect_apply(ctx.dd.delta_Tstar, h);
  add_scaled(new_a0, cplx{-1.0, 0.0}, apply_adjoint(ctx.op, b0));
  out.slots.emplace(1, std::move(new_a0));

  for (const auto& [slot, vec] : v.slots) {
    if (slot > 0) out.slots.emplace(slot + 1, vec);   // a-tail moves outward
    if (slot < -1) out.slots.emplace(slot + 1, vec);  // b-tail moves inward
  }
  drop_zero_slots(out);
  return out;
}

DilationVector dilation_apply_adjoint(const OperatorContext& ctx, const DilationVector& v,
                                      bool validate) {
  if (validate) validate_dilation_vector(ctx, v);
  DilationVector out;
  const VecH h = slot_or_zero(ctx, v, 0);
  const VecH a0 = slot_or_zero(ctx, v, 1);

  VecH new_h = apply_adjoint(ctx.op, h);
  add_scaled(new_h, cplx{1.0, 0.0}, defect_apply(ctx.dd.delta_Tstar, a0));
  out.slots.emplace(0, std::move(new_h));

  VecH new_b0 = defect_apply(ctx.dd.delta_T, h);
  add_scaled(new_b0, cplx{-1.0, 0.0}, apply(ctx.op, a0));
  out.slots.emplace(-1, std::move(new_b0));

  for (const auto& [slot, vec] : v.slots) {
    if (slot < 0) out.slots.emplace(slot - 1, vec);  // b-tail moves outward
    if (slot > 1) out.slots.emplace(slot - 1, vec);  // a-tail moves inward
  }
  drop_zero_slots(out);
  return out;
}

double compression_check(const OperatorContext& ctx, int n_max, int samples,
                         std::uint64_t seed) {
  SplitMix64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    VecH h = random_vector(ctx.op, rng);
    const double n = norm(h);
    if (n == 0.0) continue;
    scale(h, cplx{1.0 / n, 0.0});
    DilationVector v = embed_h(ctx, h);
    VecH power = h;
    for (int step = 1; step <= n_max; ++step) {
      v = dilation_apply(ctx, v, false);
      power = apply(ctx.op, power);
      VecH diff = slot_or_zero(ctx, v, 0);
      add_scaled(diff, cplx{-1.0, 0.0}, power);
      worst = std::max(worst, norm(diff));
    }
  }
  return worst;
}

std::pair<WanderingSubspace, WanderingSubspace> wandering_spaces(const OperatorContext& ctx) {
  WanderingSubspace l{WanderingSubspace::Label::L, {}};
  WanderingSubspace lstar{WanderingSubspace::Label::Lstar, {}};
  for (const VecH& u : ctx.dd.basis_Tstar) {
    DilationVector v;
    v.slots.emplace(1, u);
    l.basis.push_back(std::move(v));
  }
  for (const VecH& b : ctx.dd.basis_T) {
    DilationVector v;
    v.slots.emplace(-1, b);
    lstar.basis.push_back(std::move(v));
  }
  if (is_partial_isometry(ctx.op)) {
    // U L* = range(Delta_T), inside H: everything away from slot 0 must die.
    for (const DilationVector& b : lstar.basis) {
      DilationVector ub = dilation_apply(ctx, b, false);
      double off = 0.0;
      for (const auto& [slot, vec] : ub.slots)
        if (slot != 0) off += norm2(vec);
      if (off > 1e-20)
        throw NumericError("wandering_spaces: U L* escaped H on a partial isometry");
    }
  }
  return {std::move(l), std::move(lstar)};
}

AffinitySum affinity_partial_sum(const OperatorContext& ctx, const WanderingSubspace& from,
                                 const WanderingSubspace& to, int horizon) {
  if (horizon < 0) throw DomainError("affinity_partial_sum: negative horizon");
  AffinitySum out;
  out.partials.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  if (from.basis.empty() || to.basis.empty()) return out;

  // t[m] = term at n = +-m; each term is sum_{f,g} |<U^n f, g>|^2.
  std::vector<double> t(static_cast<std::size_t>(horizon) + 1, 0.0);
  std::vector<double> t_neg(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (const DilationVector& f : from.basis) {
    DilationVector fwd = f;
    DilationVector bwd = f;
    for (int m = 0; m <= horizon; ++m) {
      if (m > 0) {
        fwd = dilation_apply(ctx, fwd, false);
        bwd = dilation_apply_adjoint(ctx, bwd, false);
      }
      for (const DilationVector& g : to.basis) {
        t[static_cast<std::size_t>(m)] += std::norm(dvec_inner(fwd, g));
        if (m > 0) t_neg[static_cast<std::size_t>(m)] += std::norm(dvec_inner(bwd, g));
      }
    }
  }
  double acc = 0.0;
  for (int m = 0; m <= horizon; ++m) {
    acc += t[static_cast<std::size_t>(m)];
    if (m > 0) acc += t_neg[static_cast<std::size_t>(m)];
    out.partials[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

ReciprocityReport reciprocity_check(const OperatorContext& ctx, int horizon, double tol) {
  auto [l, lstar] = wandering_spaces(ctx);
  // tr(P_L P_{M(L*)}) iterates L*, projecting onto L, and vice versa.
  const AffinitySum fwd = affinity_partial_sum(ctx, lstar, l, horizon);
  const AffinitySum bwd = affinity_partial_sum(ctx, l, lstar, horizon);
  ReciprocityReport rep;
  rep.forward = fwd.value();
  rep.backward = bwd.value();
  rep.gap = std::abs(rep.forward - rep.backward);
  const auto incr = [](const AffinitySum& a) {
    const std::size_t n = a.partials.size();
    return n >= 2 ? a.partials[n - 1] - a.partials[n - 2] : 0.0;
  };
  rep.last_increment_forward = incr(fwd);
  rep.last_increment_backward = incr(bwd);
  auto monotone = [](const AffinitySum& a) {
    for (std::size_t i = 1; i < a.partials.size(); ++i)
      if (a.partials[i] < a.partials[i - 1] - 1e-15) return false;
    return true;
  };
  rep.monotone = monotone(fwd) && monotone(bwd);
  rep.tol = tol;
  rep.pass = rep.gap <= tol && rep.monotone;
  return rep;
}

DilationCurvature curvature_via_dilation(const OperatorContext& ctx, int horizon) {
  if (!is_partial_isometry(ctx.op))
    throw PreconditionError(
        "curvature_via_dilation needs a partial isometry; extend the operator first");
  DilationCurvature out;
  out.q = ctx.dd.rank_T;
  out.horizon = horizon;
  out.pure_hypothesis = purity_test(ctx.op);

  auto [l, lstar] = wandering_spaces(ctx);
  // U L* basis: for a partial isometry U(b @ slot -1) = (Delta_T b) @ slot 0
  // and Delta_T acts as the identity on its range, so this is exact.
  WanderingSubspace ulstar{WanderingSubspace::Label::Lstar, {}};
  for (const DilationVector& b : lstar.basis)
    ulstar.basis.push_back(dilation_apply(ctx, b, false));

  const AffinitySum aff = affinity_partial_sum(ctx, l, ulstar, horizon);
  out.affinity = aff.value();
  out.value = static_cast<double>(out.q) - out.affinity;
  return out;
}

}  // namespace curvop
