// Acceptance suite: one criterion per function, each printing a PASS/FAIL
// line with its worst observed deviation and runtime.  Exit code 0 only when
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "curvop/analysis.hpp"
#include "curvop/corpus.hpp"
#include "curvop/curvature.hpp"
#include "curvop/defect.hpp"
#include "curvop/dilation.hpp"
#include "curvop/fredholm.hpp"
#include "curvop/prng.hpp"

using namespace curvop;

namespace {

struct Criterion {
  bool pass = true;
  double worst = 0.0;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void bound(double dev, double tol, const std::string& what) {
    worst = std::max(worst, dev);
    if (!(dev <= tol)) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: %.3e > %.3e", what.c_str(), dev, tol);
      detail += buf;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Non-integral curvature: the kappa family hits kappa on all four
//    estimators at the stated tolerances, each value within 1 second.
Criterion criterion1() {
  Criterion c;
  for (double kappa : {0.0, 0.25, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const OperatorSpec shift = kappa_example(kappa);
    c.bound(std::abs(curvature_exact_shift(*shift.get_if<WeightedShiftSpec>()) - kappa), 1e-12,
            "exact");

    // The Q realization: a_0 = 1, a_n = kappa afterwards, so the limit lands
    // by n = 2.  At kappa = 0 the base shift is unitary, nothing is
    // adjoined, and the sequence is identically zero from the start.
    OperatorContext cq = make_context(extend_to_partial_isometry(shift));
    const DefectSequence seq = defect_sequence(cq);
    auto value_at = [&](std::size_t n) {
      return n < seq.values.size() ? seq.values[n] : seq.values.back();
    };
    c.bound(std::abs(value_at(1) - kappa), 1e-12, "a_1");
    c.bound(std::abs(value_at(2) - kappa), 1e-12, "a_2");
    c.bound(std::abs(curvature_limit(cq).value - kappa), 1e-12, "limit");

    // Cesaro at n = 1e4: the error is exactly (1 - kappa)/n when a defect
    // direction was adjoined (a_0 = 1), and exactly zero otherwise.
    const CesaroEstimate ces = curvature_cesaro(cq, 10000);
    c.bound(std::abs(ces.value - kappa), 2e-4, "cesaro vs kappa");
    const double closed_form = kappa > 0.0 ? kappa + (1.0 - kappa) / 10000.0 : 0.0;
    c.bound(std::abs(ces.value - closed_form), 1e-12, "cesaro closed form");

    // Integral at r = 0.999, M = 4096 over the window [-8 .. 8 + 3500].
    OperatorContext ct = make_context(shift);
    IntegralOptions iopt;
    iopt.radii = {0.999};
    iopt.quad_points = 4096;
    iopt.window = {{-8, 8 + 3500}};
    c.bound(std::abs(curvature_integral(ct, iopt).estimates.front().value - kappa), 5e-3,
            "integral");

    const double dt = seconds_since(t0);
    c.require(dt < 1.0, "runtime " + std::to_string(dt) + "s for one kappa");
  }
  return c;
}

// 2. Pure shifts: the curvature equals the defect-rank difference, which is
//    minus the index; K = m = -index within 5 seconds.
Criterion criterion2() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  {
    const IndexReport rep = theorem4_verdict(make_context(unilateral_shift()));
    c.bound(std::abs(rep.curvature - 1.0), 1e-12, "K(S)");
    c.require(rep.index == -1 && rep.theorem4_holds.value_or(false), "S verdict");
  }
  for (int m = 1; m <= 5; ++m) {
    const IndexReport rep = theorem4_verdict(make_context(shift_power(m)));
    c.bound(std::abs(rep.curvature - m), 1e-9, "K(S^m)");
    c.require(rep.index == -m, "index(S^m)");
    c.require(rep.theorem4_holds.value_or(false), "S^m verdict");
  }
  SplitMix64 rng(424242);
  for (int i = 0; i < 20; ++i) {
    const IndexReport rep = theorem4_verdict(make_context(random_weighted_shift(rng.next())));
    c.bound(std::abs(rep.curvature - 1.0), 1e-8, "K(random weighted shift)");
    c.require(rep.index == -1, "index(random weighted shift)");
  }
  const double dt = seconds_since(t0);
  c.require(dt < 5.0, "runtime " + std::to_string(dt) + "s");
  return c;
}

// 3. Sharpness of the purity hypothesis.
Criterion criterion3() {
  Criterion c;
  {
    const IndexReport rep = theorem4_verdict(make_context(kappa_example(0.5)));
    c.require(!rep.is_pure, "kappa(0.5) must not be pure");
    c.bound(std::abs(rep.curvature - 0.5), 1e-9, "K(kappa 0.5)");
  }
  {
    const IndexReport rep = theorem4_verdict(make_context(backward_shift_op()));
    c.bound(std::abs(rep.curvature), 1e-12, "K(S*)");
    c.require(rep.index == 1, "index(S*) = +1");
    c.require(!rep.is_pure, "S* must not be pure");
    c.require(std::abs(rep.curvature + rep.index) > 0.5, "K != -index for S*");
  }
  return c;
}

// 4. Proposition 1 on 100 seeded dense contractions, dim <= 12.
Criterion criterion4() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  SplitMix64 rng(1001);
  for (int i = 0; i < 100; ++i) {
    const int dim = 2 + static_cast<int>(rng.below(11));
    const OperatorSpec t = random_contraction(dim, rng.next());
    const CMat q = assemble_extension_dense(t.get_if<DenseOperator>()->m);
    c.bound(spectral_norm(matmul(q, matmul(adjoint(q), q)) - q), 1e-10, "partial isometry");
    const Prop1RankReport rep = prop1_rank_check(t);
    c.require(rep.coker_rank_equal && rep.ker_rank_equal, "rank equalities");
    c.bound(1e3 / std::min(rep.margin_Q, rep.margin_Qstar), 1.0, "threshold margin >= 1e3");
    const double kt = curvature_limit(make_context(t)).value;
    const double kq = curvature_limit(make_context(extend_to_partial_isometry(t))).value;
    c.bound(std::abs(kq - kt), 1e-8, "K(Q) vs K(T)");
  }
  const double dt = seconds_since(t0);
  c.require(dt < 10.0, "runtime " + std::to_string(dt) + "s");
  return c;
}

// 5. Vanishing curvature: strict contractions and nilpotent blocks.
Criterion criterion5() {
  Criterion c;
  SplitMix64 rng(5005);
  for (int i = 0; i < 50; ++i) {
    const int dim = 2 + static_cast<int>(rng.below(9));
    OperatorContext ctx = make_context(random_contraction(dim, rng.next()));
    c.bound(std::abs(curvature_limit(ctx).value), 1e-8, "K of sigma=0.95 contraction");
  }
  for (int n = 1; n <= 10; ++n) {
    OperatorContext ctx = make_context(jordan_nilpotent(n));
    const DefectSequence seq = defect_sequence(ctx);
    const double at_n = static_cast<std::size_t>(n) < seq.values.size()
                            ? seq.values[static_cast<std::size_t>(n)]
                            : seq.values.back();
    c.require(at_n == 0.0, "jordan(" + std::to_string(n) + ") not exactly 0 by step n");
  }
  return c;
}

// 6. Estimator equivalence across the corpus.
Criterion criterion6() {
  Criterion c;
  int integral_checked = 0;
  for (const CorpusEntry& e : default_corpus()) {
    OperatorContext ctx = make_context(e.spec);
    const double limit = curvature_limit(ctx).value;
    c.bound(std::abs(limit - curvature_cesaro(ctx, 100000).value), 1e-3,
            "cesaro equivalence: " + e.name);
    if (e.integral_applicable) {
      IntegralOptions iopt;
      iopt.radii = {0.999};
      c.bound(std::abs(limit - curvature_integral(ctx, iopt).estimates.front().value), 5e-3,
              "integral equivalence: " + e.name);
      ++integral_checked;
    }
  }
  c.require(integral_checked >= 10, "integral check must cover the corpus");
  return c;
}

// 7. Collapsing-sum identity on the dense corpus.
Criterion criterion7() {
  Criterion c;
  for (const CorpusEntry& e : default_corpus())
    if (e.spec.is<DenseOperator>())
      for (int n : {1, 5, 10, 20})
        c.bound(collapsing_sum_check(e.spec, n), 1e-10, "collapsing sum: " + e.name);
  return c;
}

// 8. Dilation: compression, unitarity, wandering orthogonality.
Criterion criterion8() {
  Criterion c;
  SplitMix64 rng(8008);
  int unit_vectors = 0;
  for (const CorpusEntry& e : default_corpus()) {
    OperatorContext ctx = make_context(e.spec);
    c.bound(compression_check(ctx, 25, 3, rng.next()), 1e-10, "compression: " + e.name);
    for (int i = 0; i < 5; ++i) {
      DilationVector v = embed_h(ctx, random_vector(ctx.op, rng));
      if (!ctx.dd.basis_T.empty()) {
        DilationVector extra;
        extra.slots.emplace(-1 - static_cast<int>(rng.below(3)),
                            ctx.dd.basis_T[rng.below(ctx.dd.basis_T.size())]);
        dvec_add_scaled(v, cplx{rng.sym(), rng.sym()}, extra);
      }
      if (!ctx.dd.basis_Tstar.empty()) {
        DilationVector extra;
        extra.slots.emplace(1 + static_cast<int>(rng.below(3)),
                            ctx.dd.basis_Tstar[rng.below(ctx.dd.basis_Tstar.size())]);
        dvec_add_scaled(v, cplx{rng.sym(), rng.sym()}, extra);
      }
      const double n0 = dvec_norm(v);
      if (n0 == 0.0) continue;
      ++unit_vectors;
      const DilationVector uv = dilation_apply(ctx, v);
      c.bound(std::abs(dvec_norm(uv) - n0) / std::max(1.0, n0), 1e-12,
              "norm preservation: " + e.name);
      DilationVector back = dilation_apply_adjoint(ctx, uv);
      dvec_add_scaled(back, cplx{-1, 0}, v);
      c.bound(dvec_norm(back) / std::max(1.0, n0), 1e-12, "U*U = 1: " + e.name);
    }
  }
  c.require(unit_vectors >= 100, "unitarity must cover 100 random vectors");

  for (const CorpusEntry& e : partial_isometry_corpus()) {
    OperatorContext ctx = make_context(e.spec);
    auto [l, lstar] = wandering_spaces(ctx);
    for (const WanderingSubspace* space : {&l, &lstar}) {
      for (const DilationVector& f : space->basis) {
        DilationVector fwd = f;
        for (int n = 1; n <= 50; ++n) {
          fwd = dilation_apply(ctx, fwd, false);
          for (const DilationVector& g : space->basis)
            c.bound(std::abs(dvec_inner(fwd, g)), 1e-12, "wandering orthogonality: " + e.name);
        }
      }
    }
  }
  return c;
}

// 9. Reciprocity and the dilation curvature estimator.
Criterion criterion9() {
  Criterion c;
  for (const CorpusEntry& e : partial_isometry_corpus()) {
    OperatorContext ctx = make_context(e.spec);
    const ReciprocityReport rep = reciprocity_check(ctx, 500);
    c.bound(rep.gap, 1e-6, "reciprocity gap: " + e.name);
    c.require(rep.monotone, "monotone partial sums: " + e.name);
    const double limit = curvature_limit(ctx).value;
    const DilationCurvature dil = curvature_via_dilation(ctx, 1000);
    c.bound(std::abs(dil.value - limit), 1e-6, "KT2 vs limit: " + e.name);
  }
  OperatorContext half = make_context(extend_to_partial_isometry(kappa_example(0.5)));
  const DilationCurvature k = curvature_via_dilation(half, 1000);
  c.bound(std::abs(k.value - 0.5), 1e-6, "kappa(0.5) via dilation");
  c.bound(std::abs(curvature_limit(half).value - 0.5), 1e-6, "kappa(0.5) via limit");
  return c;
}

// 10. Additivity over direct sums, plus exact curvature targets.
Criterion criterion10() {
  Criterion c;
  const std::vector<CorpusEntry> corpus = default_corpus();
  SplitMix64 rng(1010);
  for (int i = 0; i < 20; ++i) {
    const CorpusEntry& e1 = corpus[rng.below(corpus.size())];
    const CorpusEntry& e2 = corpus[rng.below(corpus.size())];
    c.bound(additivity_check(e1.spec, e2.spec).gap, 1e-8,
            "additivity: " + e1.name + " + " + e2.name);
  }
  for (double target : {1.5, 2.4, 3.141592653589793}) {
    const double exact = curvature_exact(kappa_target_sum(target)).value_or(-1.0);
    c.bound(std::abs(exact - target), 1e-10, "exact curvature target");
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria{
      {"non-integral curvature (kappa family, four estimators)", criterion1},
      {"pure shifts: K = rank difference = -index", criterion2},
      {"sharpness of purity (kappa 0.5, backward shift)", criterion3},
      {"proposition 1: extension is a partial isometry, ranks, K(Q)=K(T)", criterion4},
      {"vanishing curvature (strict contractions, nilpotents)", criterion5},
      {"estimator equivalence (limit vs cesaro vs integral)", criterion6},
      {"collapsing-sum identity (dense corpus)", criterion7},
      {"dilation: compression, unitarity, wandering orthogonality", criterion8},
      {"reciprocity identity and dilation curvature", criterion9},
      {"additivity over direct sums, exact targets", criterion10},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double dt = seconds_since(t0);
    std::printf("[%s] criterion %02zu %s (worst %.3e, %.2fs)%s%s\n", c.pass ? "PASS" : "FAIL",
                i + 1, criteria[i].first.c_str(), c.worst, dt, c.detail.empty() ? "" : " -- ",
                c.detail.c_str());
    if (!c.pass) ++failures;
  }
  std::printf("ACCEPTANCE: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
