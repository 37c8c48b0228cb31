#include <doctest.h>

#include <cmath>

#include "curvop/corpus.hpp"
#include "curvop/curvature.hpp"
#include "curvop/errors.hpp"
#include "curvop/operators.hpp"
#include "curvop/prng.hpp"
#include "helpers.hpp"

using namespace curvop;
using testutil::bilateral_shift;
using testutil::diag;
using testutil::random_matrix;
using testutil::unilateral_shift_with;

namespace {
const double lambda = std::sqrt(1.0 - 0.25);  // kappa = 0.25 weight
}

TEST_CASE("apply on shifts") {
  const OperatorSpec s = unilateral_shift();
  VecH out = apply(s, VecH::unit(1));
  CHECK(std::abs(inner(out, VecH::unit(2)) - cplx{1, 0}) <= 1e-15);
  CHECK(std::abs(norm(out) - 1.0) <= 1e-15);

  const OperatorSpec t = kappa_example(0.25);  // w_0 = lambda
  out = apply(t, VecH::unit(0));
  CHECK(std::abs(inner(out, VecH::unit(1)) - cplx{lambda, 0}) <= 1e-15);
  CHECK(norm2(out) == doctest::Approx(lambda * lambda).epsilon(1e-14));
}

TEST_CASE("apply on a dense identity returns the input") {
  const OperatorSpec id = OperatorSpec::dense(CMat::identity(4));
  SplitMix64 rng(5);
  const VecH x = random_vector(id, rng);
  VecH diff = apply(id, x);
  add_scaled(diff, cplx{-1, 0}, x);
  CHECK(norm(diff) <= 1e-15);
}

TEST_CASE("apply_adjoint examples") {
  const OperatorSpec s = unilateral_shift();
  CHECK(norm(apply_adjoint(s, VecH::unit(1))) == 0.0);  // e_1 spans coker(S)

  const OperatorSpec t = kappa_example(0.25);
  const VecH out = apply_adjoint(t, VecH::unit(1));
  CHECK(std::abs(inner(out, VecH::unit(0)) - std::conj(cplx{lambda, 0})) <= 1e-15);

  // Dense adjoint against an independent conjugate-transpose loop.
  const CMat a = random_matrix(7, 42);
  const OperatorSpec d = OperatorSpec::dense(a);
  SplitMix64 rng(43);
  const VecH x = random_vector(d, rng);
  const auto& xc = std::get<VecH::Dense>(x.node);
  std::vector<cplx> want(7, cplx{0, 0});
  for (std::size_t j = 0; j < 7; ++j)
    for (std::size_t i = 0; i < 7; ++i) want[j] += std::conj(a.at(i, j)) * xc[i];
  const VecH adj = apply_adjoint(d, x);
  const auto& got = std::get<VecH::Dense>(adj.node);
  for (std::size_t j = 0; j < 7; ++j) CHECK(std::abs(got[j] - want[j]) <= 1e-14);
}

TEST_CASE("operator_norm") {
  CHECK(operator_norm(unilateral_shift()) == 1.0);
  CHECK(operator_norm(bilateral_shift({{0, cplx{0.6, 0}}})) == 1.0);
  CHECK(std::abs(operator_norm(OperatorSpec::dense(diag({0.5, 0.25}))) - 0.5) <= 1e-13);
}

TEST_CASE("is_contraction") {
  CHECK_FALSE(is_contraction(OperatorSpec::dense(diag({1.1, 0.0}))));
  CHECK(is_contraction(unilateral_shift()));
  // Scaling by 1/sigma_max always lands inside the ball.
  CMat a = random_matrix(6, 9);
  const double top = spectral_norm(a);
  kern::ops().scal(a.a.size(), cplx{1.0 / top, 0.0}, a.a.data());
  CHECK(is_contraction(OperatorSpec::dense(a)));
}

TEST_CASE("direct_sum") {
  const OperatorSpec ss = direct_sum({unilateral_shift(), unilateral_shift()});
  const VecH x = VecH::parts({VecH::unit(1), VecH::sparse({})});
  const VecH out = apply(ss, x);
  const auto& parts = std::get<std::vector<VecH>>(out.node);
  CHECK(std::abs(inner(parts[0], VecH::unit(2)) - cplx{1, 0}) <= 1e-15);
  CHECK(norm(parts[1]) == 0.0);

  const OperatorSpec dd =
      direct_sum({OperatorSpec::dense(diag({0.5})), OperatorSpec::dense(diag({0.25, 0.1}))});
  CHECK(densify(dd, 0, 0).rows == 3);  // dims add for dense parts

  // Norm = max over parts, cross-checked against the dense assembly.
  const OperatorSpec mix =
      direct_sum({OperatorSpec::dense(diag({0.5, 0.25})), OperatorSpec::dense(diag({0.75}))});
  CHECK(std::abs(operator_norm(mix) - spectral_norm(densify(mix, 0, 0))) <= 1e-13);

  CHECK_THROWS_AS((void)direct_sum({}), DomainError);
}

TEST_CASE("densify windows") {
  // Plain S on [1..4]: nilpotent Jordan-type shift.
  const CMat s4 = densify(unilateral_shift(), 1, 4);
  REQUIRE(s4.rows == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(s4.at(i, j) - ((i == j + 1) ? cplx{1, 0} : cplx{0, 0})) <= 1e-15);

  // Dense operators come back unchanged.
  const CMat d = diag({0.5, 0.25});
  const CMat back = densify(OperatorSpec::dense(d), -10, 10);
  CHECK(max_abs(back - d) == 0.0);

  // kappa example on [-3..3]: 7x7 with subdiagonal (1,1,1,lambda,1,1).
  const CMat w = densify(kappa_example(0.25), -3, 3);
  REQUIRE(w.rows == 7);
  const double expected[6] = {1, 1, 1, lambda, 1, 1};
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(std::abs(w.at(k + 1, k) - cplx{expected[k], 0}) <= 1e-15);

  CHECK_THROWS_AS((void)densify(kappa_example(0.25), 1, 4), DomainError);  // excludes w_0
}

TEST_CASE("adjoint consistency across variants") {
  SplitMix64 rng(2024);
  std::vector<OperatorSpec> ops;
  ops.push_back(unilateral_shift());
  ops.push_back(kappa_example(0.5));
  ops.push_back(shift_power(3));
  ops.push_back(backward_shift_op());
  ops.push_back(OperatorSpec::dense(random_matrix(6, 3)));
  ops.push_back(direct_sum({kappa_example(0.25), unilateral_shift()}));
  ops.push_back(extend_to_partial_isometry(random_contraction(5, 8)));
  for (const OperatorSpec& t : ops) {
    for (int i = 0; i < 20; ++i) {
      const VecH x = random_vector(t, rng);
      const VecH y = random_vector(t, rng);
      const cplx lhs = inner(apply(t, x), y);
      const cplx rhs = inner(x, apply_adjoint(t, y));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, norm(x) * norm(y)));
    }
  }
}

TEST_CASE("nested composite trees behave like operators") {
  // sum(sum(kappa, S), extension(dense)) exercises every recursion at once.
  const OperatorSpec tree = direct_sum(
      {direct_sum({kappa_example(0.5), unilateral_shift()}),
       extend_to_partial_isometry(random_contraction(4, 77))});
  SplitMix64 rng(88);
  for (int i = 0; i < 15; ++i) {
    const VecH x = random_vector(tree, rng);
    const VecH y = random_vector(tree, rng);
    CHECK(std::abs(inner(apply(tree, x), y) - inner(x, apply_adjoint(tree, y))) <=
          1e-12 * std::max(1.0, norm(x) * norm(y)));
    CHECK(norm(apply(tree, x)) <= (1.0 + 1e-9) * norm(x) + 1e-15);
  }
  CHECK(operator_norm(tree) == 1.0);
  // Curvature adds across the tree: 0.5 + 1 + (vanishing).
  CHECK(std::abs(curvature_limit(make_context(tree)).value - 1.5) <= 1e-8);
}

TEST_CASE("contraction bound holds pointwise") {
  SplitMix64 rng(99);
  for (const OperatorSpec& t :
       {unilateral_shift(), kappa_example(0.7), random_contraction(8, 12),
        extend_to_partial_isometry(kappa_example(0.3))}) {
    REQUIRE(is_contraction(t));
    for (int i = 0; i < 25; ++i) {
      const VecH x = random_vector(t, rng);
      CHECK(norm(apply(t, x)) <= (1.0 + 1e-9) * norm(x) + 1e-15);
    }
  }
}

TEST_CASE("shift application is support-exact") {
  // Zero weight kills the corresponding index; everything else shifts by one.
  const OperatorSpec t = unilateral_shift_with({{3, cplx{0, 0}}, {5, cplx{0.5, 0}}});
  const VecH x = VecH::sparse({{1, cplx{1, 0}}, {3, cplx{2, 0}}, {5, cplx{3, 0}}});
  const VecH tx = apply(t, x);
  const auto& out = std::get<VecH::Sparse>(tx.node);
  REQUIRE(out.size() == 2);  // index 3 killed by the zero weight
  CHECK(out.count(2) == 1);
  CHECK(out.count(6) == 1);
  CHECK(out.count(4) == 0);
}

TEST_CASE("densify commutes with apply well inside the window") {
  const OperatorSpec t = kappa_example(0.25);
  const std::int64_t lo = -10, hi = 10;
  const CMat w = densify(t, lo, hi);
  SplitMix64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    VecH::Sparse entries;
    for (int i = 0; i < 4; ++i)
      entries[static_cast<std::int64_t>(rng.below(9)) - 4] = cplx{rng.sym(), rng.sym()};
    const VecH x = VecH::sparse(entries);
    const int n = 3;  // supports stay >= n slots from the boundary
    VecH tx = x;
    for (int i = 0; i < n; ++i) tx = apply(t, tx);
    auto dense_side = flatten_window(t, x, lo, hi);
    for (int i = 0; i < n; ++i) dense_side = matvec(w, dense_side);
    const auto sparse_side = flatten_window(t, tx, lo, hi);
    for (std::size_t i = 0; i < dense_side.size(); ++i)
      CHECK(std::abs(dense_side[i] - sparse_side[i]) <= 1e-13);
  }
}

TEST_CASE("domain errors") {
  const OperatorSpec d = OperatorSpec::dense(diag({0.5, 0.5}));
  CHECK_THROWS_AS((void)apply(d, VecH::dense({cplx{1, 0}})), DomainError);
  CHECK_THROWS_AS((void)apply(unilateral_shift(), VecH::unit(0)), DomainError);
  CHECK_THROWS_AS((void)apply(unilateral_shift(), VecH::dense({cplx{1, 0}})), DomainError);
  // Shift weights beyond modulus 1 are rejected at construction.
  CHECK_THROWS_AS((void)unilateral_shift_with({{1, cplx{1.5, 0}}}), DomainError);
}

TEST_CASE("apply_power uses the exact step rule") {
  const OperatorSpec p = shift_power(3);
  const VecH out = apply_power(p, VecH::unit(2), 4);
  CHECK(std::abs(inner(out, VecH::unit(2 + 12)) - cplx{1, 0}) <= 1e-15);
  CHECK(std::abs(norm(out) - 1.0) <= 1e-15);
}
