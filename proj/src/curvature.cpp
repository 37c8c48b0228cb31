#include "curvop/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "curvop/errors.hpp"

namespace curvop {

OperatorContext make_context(OperatorSpec op) {
  DefectData dd = defect(op);  // checks the contraction bound
  return OperatorContext{std::move(op), std::move(dd)};
}

// ---------------------------------------------------------------------------
// Defect sequence and limit
// ---------------------------------------------------------------------------

DefectSequence defect_sequence(const OperatorContext& ctx, const SequenceOptions& opt) {
  if (opt.n_max < 0 || opt.window < 1) throw DomainError("defect_sequence: bad options");
  DefectSequence seq;
  if (ctx.dd.rank_T == 0) {
    seq.values = {0.0};
    seq.converged = true;
    return seq;
  }

  std::vector<VecH> cols = ctx.dd.delta_cols_T;
  auto term = [&]() {
    double s = 0.0;
    for (const VecH& c : cols) s += norm2(c);
    return s;
  };
  seq.values.push_back(term());
  for (int n = 1; n <= opt.n_max; ++n) {
    for (VecH& c : cols) {
      c = apply(ctx.op, c);
      prune_zeros(c);
    }
    seq.values.push_back(term());
    if (n >= opt.window) {
      seq.window_drop =
          seq.values[static_cast<std::size_t>(n - opt.window)] - seq.values.back();
      if (seq.window_drop < opt.eps) {
        seq.converged = true;
        seq.n_used = n;
        return seq;
      }
    }
  }
  seq.n_used = static_cast<int>(seq.values.size()) - 1;
  if (!seq.values.empty() && seq.n_used >= opt.window)
    seq.window_drop = seq.values[static_cast<std::size_t>(seq.n_used - opt.window)] -
                      seq.values.back();
  // Not converged: the limit exists (monotone bounded) but only the upper
  // bound a_n is certifiable here; flagged, never thrown.
  return seq;
}

LimitEstimate curvature_limit(const OperatorContext& ctx, const SequenceOptions& opt) {
  LimitEstimate est;
  est.seq = defect_sequence(ctx, opt);
  est.value = est.seq.values.back();
  est.converged = est.seq.converged;
  return est;
}

// ---------------------------------------------------------------------------
// Cesaro mean via the collapsing sum
// ---------------------------------------------------------------------------

CesaroEstimate curvature_cesaro(const OperatorContext& ctx, long long n_max) {
  if (n_max < 1) throw DomainError("curvature_cesaro: n_max must be positive");
  CesaroEstimate est;
  est.n = n_max;
  if (ctx.dd.rank_T == 0) {
    est.terms_computed = 1;
    return est;
  }

  std::vector<VecH> cols = ctx.dd.delta_cols_T;
  auto term = [&]() {
    double s = 0.0;
    for (const VecH& c : cols) s += norm2(c);
    return s;
  };

  const int stall_window = 50;
  std::vector<double> recent;
  long double sum = 0.0L;
  double a = term();
  const double stall_eps = 1e-15 * std::max(1.0, a);
  long long computed = 0;
  while (computed < n_max) {
    sum += a;
    recent.push_back(a);
    ++computed;
    if (computed >= stall_window &&
        recent[recent.size() - static_cast<std::size_t>(stall_window)] - a < stall_eps) {
      est.tail_extended = computed < n_max;
      sum += static_cast<long double>(n_max - computed) * a;
      break;
    }
    if (computed == n_max) break;
    for (VecH& c : cols) {
      c = apply(ctx.op, c);
      prune_zeros(c);
    }
    a = term();
  }
  est.terms_computed = static_cast<int>(computed);
  est.value = static_cast<double>(sum / static_cast<long double>(n_max));
  return est;
}

// ---------------------------------------------------------------------------
// Integral estimate
// ---------------------------------------------------------------------------

namespace {

bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

void validate_integral_options(const IntegralOptions& opt) {
  for (double r : opt.radii)
    if (!(r > 0.0 && r < 1.0))
      throw DomainError("curvature_integral: radius must lie in (0,1)");
  if (!power_of_two(opt.quad_points) || opt.quad_points < 64)
    throw DomainError("curvature_integral: quad points must be a power of two >= 64");
}

std::int64_t max_leaf_step(const OperatorSpec& op) {
  if (const auto* p = op.get_if<StepShiftSpec>()) return p->step;
  if (const auto* ds = op.get_if<DirectSumSpec>()) {
    std::int64_t m = 1;
    for (const auto& part : ds->parts) m = std::max(m, max_leaf_step(part));
    return m;
  }
  if (const auto* ext = op.get_if<ExtensionSpec>()) return max_leaf_step(ext->inner());
  return 1;
}

// Right margin so that the windowed orbit loses at most ~e^-7 of its Abel
// weight: r^(2 margin) <= e^-7.
std::int64_t window_margin(double r) {
  const double need = 7.0 / (2.0 * -std::log(r));
  if (need > 5e5)
    throw DomainError("curvature_integral: radius too close to 1 for the shift window");
  return static_cast<std::int64_t>(std::ceil(need)) + 1;
}

// Dense path: trapezoid over M roots of unity; per node one LU factorization
// and one solve per defect column.
double integral_dense_one_r(const CMat& a, const std::vector<std::vector<cplx>>& cols,
                            double r, int m_nodes) {
  const std::size_t n = a.rows;
  double acc = 0.0;
  std::vector<cplx> x(n);
  for (int j = 0; j < m_nodes; ++j) {
    const double ang = -2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m_nodes);
    const cplx rzbar = r * cplx{std::cos(ang), std::sin(ang)};
    CMat node = CMat::identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) node.at(i, k) -= rzbar * a.at(i, k);
    const LuFactors lu = lu_factor(node);
    for (const auto& c : cols) {
      x = c;
      lu_solve(lu, x);
      acc += kern::ops().norm2(n, x.data());
    }
  }
  return (1.0 - r * r) * acc / static_cast<double>(m_nodes);
}

// Forward substitution of (1 - r conj(z) T_w) x = sqrt(d) e_slot over the
// window; `weight_at(k)` is the band weight k -> k+offset.  The matrix has a
// single band, so each solve is a scalar recurrence and the column norm
// accumulates on the fly.
template <class WeightAt>
double integral_banded_one_r(std::int64_t lo, std::int64_t hi, std::int64_t offset,
                             const std::vector<std::pair<std::int64_t, double>>& slots,
                             WeightAt weight_at, double r, int m_nodes) {
  (void)lo;
  double acc = 0.0;
  for (int j = 0; j < m_nodes; ++j) {
    const double ang = -2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m_nodes);
    const cplx rzbar = r * cplx{std::cos(ang), std::sin(ang)};
    for (const auto& [slot, d] : slots) {
      cplx x = std::sqrt(d);
      double col = std::norm(x);
      for (std::int64_t k = slot + offset; k <= hi; k += offset) {
        const cplx w = weight_at(k - offset);
        if (w == cplx{0.0, 0.0}) break;
        x *= rzbar * w;
        col += std::norm(x);
      }
      acc += col;
    }
  }
  return (1.0 - r * r) * acc / static_cast<double>(m_nodes);
}

double integral_one_r(const OperatorSpec& op, double r, int m_nodes,
                      std::int64_t lo, std::int64_t hi);

double integral_one_r_shift(const WeightedShiftSpec& s, double r, int m_nodes,
                            std::int64_t lo, std::int64_t hi) {
  if (s.variant == WeightedShiftSpec::Variant::unilateral) lo = std::max<std::int64_t>(lo, 1);
  // Exact defect slots of the true shift, restricted to the window.
  std::vector<std::pair<std::int64_t, double>> slots;
  if (s.variant == WeightedShiftSpec::Variant::unilateral) slots.emplace_back(1, 1.0);
  for (const auto& [n, w] : s.overrides) {
    if (n < lo || n + 1 > hi)
      throw DomainError("curvature_integral: window excludes a shift override");
    const double d = 1.0 - std::norm(w);
    if (d > 0.0) slots.emplace_back(n + 1, d);
  }
  return integral_banded_one_r(lo, hi, 1, slots, [&](std::int64_t k) { return s.weight(k); },
                               r, m_nodes);
}

double integral_one_r(const OperatorSpec& op, double r, int m_nodes,
                      std::int64_t lo, std::int64_t hi) {
  if (const auto* s = op.get_if<WeightedShiftSpec>())
    return integral_one_r_shift(*s, r, m_nodes, lo, hi);
  if (const auto* p = op.get_if<StepShiftSpec>()) {
    std::vector<std::pair<std::int64_t, double>> slots;
    for (int k = 1; k <= p->step; ++k) slots.emplace_back(k, 1.0);
    return integral_banded_one_r(std::int64_t{1}, hi, p->step, slots,
                                 [](std::int64_t) { return cplx{1.0, 0.0}; }, r, m_nodes);
  }
  if (op.is<BackwardShiftSpec>()) return 0.0;  // Delta_T = 0
  if (const auto* ds = op.get_if<DirectSumSpec>()) {
    // Block-diagonal resolvent and block-diagonal defect: contributions add.
    double acc = 0.0;
    for (const auto& part : ds->parts) acc += integral_one_r(part, r, m_nodes, lo, hi);
    return acc;
  }
  // Dense or extension-of-dense: assemble once per call.
  if (!dense_dimension(op))
    throw DomainError("curvature_integral: no dense or windowed-shift path for " + describe(op));
  const CMat a = densify(op, 0, 0);
  if (a.rows > 512) throw DomainError("curvature_integral: dense dimension too large");
  const DefectData dd = defect(op);
  std::vector<std::vector<cplx>> cols;
  cols.reserve(dd.delta_cols_T.size());
  for (const VecH& c : dd.delta_cols_T) cols.push_back(flatten_window(op, c, 0, 0));
  return integral_dense_one_r(a, cols, r, m_nodes);
}

}  // namespace

bool integral_path_available(const OperatorSpec& op) {
  if (dense_dimension(op)) return true;
  if (op.is<WeightedShiftSpec>() || op.is<StepShiftSpec>() || op.is<BackwardShiftSpec>())
    return true;
  if (const auto* ds = op.get_if<DirectSumSpec>()) {
    for (const auto& p : ds->parts)
      if (!integral_path_available(p)) return false;
    return true;
  }
  return false;  // extension over shift operators
}

IntegralReport curvature_integral(const OperatorContext& ctx, const IntegralOptions& opt) {
  validate_integral_options(opt);
  if (!integral_path_available(ctx.op))
    throw DomainError("curvature_integral: no dense or windowed-shift path for " +
                      describe(ctx.op));
  IntegralReport rep;
  rep.quad_points = opt.quad_points;
  rep.truncation = densify_is_truncation(ctx.op);

  const bool dense_route = dense_dimension(ctx.op).has_value();
  std::vector<std::vector<cplx>> dense_cols;
  CMat a;
  if (dense_route) {
    a = densify(ctx.op, 0, 0);
    if (a.rows > 512) throw DomainError("curvature_integral: dense dimension too large");
    for (const VecH& c : ctx.dd.delta_cols_T)
      dense_cols.push_back(flatten_window(ctx.op, c, 0, 0));
  }

  std::int64_t lo = 0, hi = 0;
  if (!dense_route) {
    if (opt.window) {
      lo = opt.window->first;
      hi = opt.window->second;
    } else {
      // One window sized for the largest radius serves every radius.  Step
      // shifts advance `step` indices per application, so their orbits need a
      // proportionally longer window.
      double rmax = 0.0;
      for (double r : opt.radii) rmax = std::max(rmax, r);
      const auto bounds = shift_window_bounds(ctx.op).value_or(
          std::pair<std::int64_t, std::int64_t>{0, 1});
      lo = bounds.first - 8;
      hi = bounds.second + 8 + window_margin(rmax) * max_leaf_step(ctx.op);
    }
    rep.window_used = std::make_pair(lo, hi);
  }

  for (double r : opt.radii) {
    const double value = dense_route
                             ? integral_dense_one_r(a, dense_cols, r, opt.quad_points)
                             : integral_one_r(ctx.op, r, opt.quad_points, lo, hi);
    rep.estimates.push_back(RadialEstimate{r, value});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exact shift calculus
// ---------------------------------------------------------------------------

double curvature_exact_shift(const WeightedShiftSpec& s) {
  // Diagonal of 1-TT*: d_{n+1} = 1-|w_n|^2, plus d_1 = 1 for the unilateral
  // variant.  K = sum_j d_j prod_{i>=j} |w_i|^2, products over the finitely
  // many overrides.
  std::map<std::int64_t, double> d;
  if (s.variant == WeightedShiftSpec::Variant::unilateral) d[1] = 1.0;
  for (const auto& [n, w] : s.overrides) {
    const double v = 1.0 - std::norm(w);
    if (v > 0.0) d[n + 1] += v;
  }
  double k = 0.0;
  for (const auto& [j, dj] : d) {
    double tail = 1.0;
    for (auto it = s.overrides.lower_bound(j); it != s.overrides.end(); ++it)
      tail *= std::norm(it->second);
    k += dj * tail;
  }
  return k;
}

std::optional<double> curvature_exact(const OperatorSpec& op) {
  if (const auto* s = op.get_if<WeightedShiftSpec>()) return curvature_exact_shift(*s);
  if (const auto* p = op.get_if<StepShiftSpec>()) return static_cast<double>(p->step);
  if (op.is<BackwardShiftSpec>()) return 0.0;
  if (const auto* ds = op.get_if<DirectSumSpec>()) {
    double acc = 0.0;
    for (const auto& part : ds->parts) {
      auto k = curvature_exact(part);
      if (!k) return std::nullopt;
      acc += *k;
    }
    return acc;
  }
  if (const auto* ext = op.get_if<ExtensionSpec>())
    return curvature_exact(ext->inner());  // K(Q) = K(T)
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Identities
// ---------------------------------------------------------------------------

AdditivityReport additivity_check(const OperatorSpec& t1, const OperatorSpec& t2) {
  AdditivityReport rep;
  OperatorContext c1 = make_context(t1);
  OperatorContext c2 = make_context(t2);
  OperatorContext cs = make_context(direct_sum({t1, t2}));
  rep.k1 = curvature_limit(c1).value;
  rep.k2 = curvature_limit(c2).value;
  rep.k_sum = curvature_limit(cs).value;
  rep.gap = std::abs(rep.k_sum - rep.k1 - rep.k2);
  const bool exact_inputs = curvature_exact(t1).has_value() && curvature_exact(t2).has_value();
  rep.tol = exact_inputs ? 1e-10 : 1e-8;
  rep.pass = rep.gap <= rep.tol;
  return rep;
}

double collapsing_sum_check(const OperatorSpec& t, int n) {
  const auto* d = t.get_if<DenseOperator>();
  if (!d) throw DomainError("collapsing_sum_check: dense path only");
  if (n < 1) throw DomainError("collapsing_sum_check: n must be positive");
  const std::size_t dim = d->m.rows;
  const CMat id = CMat::identity(dim);
  const CMat g = id - matmul(d->m, adjoint(d->m));

  CMat power = id;  // T^n
  CMat rhs(dim, dim);
  for (int i = 0; i < n; ++i) {
    rhs = rhs + matmul(power, matmul(g, adjoint(power)));
    power = matmul(d->m, power);
  }
  const CMat lhs = id - matmul(power, adjoint(power));
  const CMat diff = lhs - rhs;
  // Max deviation over the standard basis = max column norm.
  double worst = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < dim; ++i) col += std::norm(diff.at(i, j));
    worst = std::max(worst, std::sqrt(col));
  }
  return worst;
}

}  // namespace curvop
