#include "curvop/fredholm.hpp"

#include <algorithm>
#include <cmath>

#include "curvop/errors.hpp"

namespace curvop {

namespace {

// Weights at or below this modulus count as zero in the closed-form kernel
// counts; shift weights are exact data, so this only guards against noise
// smuggled in through files.
constexpr double kWeightZeroTol = 1e-12;

int zero_weight_count(const WeightedShiftSpec& s) {
  int z = 0;
  for (const auto& [n, w] : s.overrides)
    if (std::abs(w) <= kWeightZeroTol) ++z;
  return z;
}

}  // namespace

PurityReport purity_report(const OperatorSpec& t) {
  PurityReport rep;
  if (const auto* d = t.get_if<DenseOperator>()) {
    rep.spectral_radius = spectral_radius(d->m);
    rep.pure = rep.spectral_radius < 1.0 - kSpectralTol;
    rep.borderline = !rep.pure;
    return rep;
  }
  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    // Unilateral: T*^n e_k dies once n >= k.  Bilateral with finite
    // overrides: lim ||T*^n e_k||^2 = prod_{i<k} |w_i|^2, which is a finite
    // product equal to 1 for every k left of all overrides -- never pure.
    rep.pure = s->variant == WeightedShiftSpec::Variant::unilateral;
    return rep;
  }
  if (t.is<StepShiftSpec>()) {
    rep.pure = true;
    return rep;
  }
  if (t.is<BackwardShiftSpec>()) {
    rep.pure = false;  // (S*)*^n = S^n is isometric
    return rep;
  }
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    rep.pure = true;
    double rho = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : ds->parts) {
      const PurityReport pr = purity_report(p);
      rep.pure = rep.pure && pr.pure;
      rep.borderline = rep.borderline || pr.borderline;
      if (!std::isnan(pr.spectral_radius))
        rho = std::isnan(rho) ? pr.spectral_radius : std::max(rho, pr.spectral_radius);
    }
    rep.spectral_radius = rho;
    return rep;
  }
  // Q*^n (h + x) = T*^n h + Delta_T T*^{n-1} h, so Q is pure iff T is.
  const auto& ext = std::get<ExtensionSpec>(t.node);
  return purity_report(ext.inner());
}

bool purity_test(const OperatorSpec& t) { return purity_report(t).pure; }

std::pair<int, int> kernel_dims(const OperatorSpec& t) {
  if (const auto* d = t.get_if<DenseOperator>()) {
    const std::vector<double> sv = singular_values(d->m);
    const std::vector<double> sv_adj = singular_values(adjoint(d->m));
    const double top = sv.empty() ? 0.0 : sv.front();
    const double thr = std::max(kRankRelTol * top, kRankAbsFloor);
    auto nulls = [&](const std::vector<double>& v) {
      int c = 0;
      for (double s : v)
        if (s < thr) ++c;
      return c;
    };
    return {nulls(sv), nulls(sv_adj)};
  }
  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    const int z = zero_weight_count(*s);
    if (s->variant == WeightedShiftSpec::Variant::unilateral) return {z, 1 + z};
    return {z, z};
  }
  if (const auto* p = t.get_if<StepShiftSpec>()) return {0, p->step};
  if (t.is<BackwardShiftSpec>()) return {1, 0};
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    int k = 0, c = 0;
    for (const auto& part : ds->parts) {
      const auto [pk, pc] = kernel_dims(part);
      k += pk;
      c += pc;
    }
    return {k, c};
  }
  // Q is a partial isometry: dim ker Q = rank(1-Q*Q) = rank(1-T*T) and
  // dim coker Q = rank(1-QQ*) = rank(1-TT*).
  const auto& ext = std::get<ExtensionSpec>(t.node);
  return {ext.inner_defect->rank_Tstar, ext.inner_defect->rank_T};
}

double closed_range_gap(const DenseOperator& t) {
  const std::vector<double> sv = singular_values(t.m);
  const double top = sv.empty() ? 0.0 : sv.front();
  const double thr = std::max(kRankRelTol * top, kRankAbsFloor);
  double gap = 0.0;
  for (double s : sv)
    if (s >= thr) gap = s;  // descending order: last accepted is the smallest
  return gap;
}

double sigma_gap(const OperatorSpec& t) {
  if (const auto* d = t.get_if<DenseOperator>()) return closed_range_gap(*d);
  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    // T*T = diag(|w_n|^2) exactly, so the singular spectrum is the weight
    // moduli together with 1.
    double gap = 1.0;
    for (const auto& [n, w] : s->overrides) {
      const double m = std::abs(w);
      if (m > kWeightZeroTol) gap = std::min(gap, m);
    }
    return gap;
  }
  if (t.is<StepShiftSpec>() || t.is<BackwardShiftSpec>()) return 1.0;
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    double gap = 1.0;
    for (const auto& p : ds->parts) gap = std::min(gap, sigma_gap(p));
    return gap;
  }
  return 1.0;  // partial isometries have singular values in {0, 1}
}

IndexReport theorem4_verdict(const OperatorContext& ctx) {
  IndexReport rep;
  const auto [k, c] = kernel_dims(ctx.op);
  rep.dim_ker = k;
  rep.dim_coker = c;
  rep.index = k - c;
  rep.sigma_gap = sigma_gap(ctx.op);
  rep.is_fredholm = rep.sigma_gap > 0.0;  // kernel/cokernel are always finite here

  const PurityReport purity = purity_report(ctx.op);
  rep.is_pure = purity.pure;
  rep.purity_borderline = purity.borderline;
  rep.spectral_radius = purity.spectral_radius;

  rep.rank_T = ctx.dd.rank_T;
  rep.rank_Tstar = ctx.dd.rank_Tstar;

  const LimitEstimate limit = curvature_limit(ctx);
  rep.curvature = limit.value;
  rep.curvature_converged = limit.converged;

  rep.theorem4_applicable = rep.is_pure;  // defect ranks are finite by construction
  if (rep.theorem4_applicable) {
    const int predicted = rep.rank_T - rep.rank_Tstar;
    rep.theorem4_holds = std::abs(rep.curvature - static_cast<double>(predicted)) <= 1e-8 &&
                         predicted == -rep.index;
  }
  return rep;
}

}  // namespace curvop
