#include <doctest.h>

#include <cmath>
#include <vector>

#include "curvop/kernels.hpp"
#include "curvop/prng.hpp"

using curvop::cplx;
using curvop::SplitMix64;
namespace kern = curvop::kern;

namespace {

std::vector<cplx> random_array(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx{rng.sym(), rng.sym()};
  return v;
}

}  // namespace

TEST_CASE("kernel variants agree on every entry point") {
  const kern::Ops& scalar = kern::scalar_ops();
  const kern::Ops& active = kern::ops();
  INFO("active kernel variant: ", active.name);
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{3},
                        std::size_t{5}, std::size_t{8}, std::size_t{33}, std::size_t{101}}) {
    const auto x = random_array(n, 7 + n);
    const auto y = random_array(n, 91 + n);
    const cplx a{0.37, -1.21};

    CHECK(std::abs(scalar.dotc(n, x.data(), y.data()) - active.dotc(n, x.data(), y.data())) <=
          1e-13 * (static_cast<double>(n) + 1.0));
    CHECK(std::abs(scalar.dotu(n, x.data(), y.data()) - active.dotu(n, x.data(), y.data())) <=
          1e-13 * (static_cast<double>(n) + 1.0));
    CHECK(std::abs(scalar.norm2(n, x.data()) - active.norm2(n, x.data())) <=
          1e-13 * (static_cast<double>(n) + 1.0));

    auto y1 = y, y2 = y;
    scalar.axpy(n, a, x.data(), y1.data());
    active.axpy(n, a, x.data(), y2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14);

    y1 = y;
    y2 = y;
    scalar.axpy_conj(n, a, x.data(), y1.data());
    active.axpy_conj(n, a, x.data(), y2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14);

    auto x1 = x, x2 = x;
    scalar.scal(n, a, x1.data());
    active.scal(n, a, x2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x1[i] - x2[i]) <= 1e-14);
  }
}

TEST_CASE("kernel identities against plain loops") {
  const std::size_t n = 37;
  const auto x = random_array(n, 3);
  const auto y = random_array(n, 4);
  const kern::Ops& k = kern::ops();

  cplx dc{0, 0}, du{0, 0};
  double n2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dc += x[i] * std::conj(y[i]);
    du += x[i] * y[i];
    n2 += std::norm(x[i]);
  }
  CHECK(std::abs(k.dotc(n, x.data(), y.data()) - dc) <= 1e-13);
  CHECK(std::abs(k.dotu(n, x.data(), y.data()) - du) <= 1e-13);
  CHECK(std::abs(k.norm2(n, x.data()) - n2) <= 1e-13);
  CHECK(std::abs(k.dotc(n, x.data(), x.data()) - cplx{n2, 0.0}) <= 1e-13);

  // y += a x then y -= a x returns to the original.
  auto z = y;
  const cplx a{-0.8, 0.45};
  k.axpy(n, a, x.data(), z.data());
  k.axpy(n, -a, x.data(), z.data());
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(z[i] - y[i]) <= 1e-14);
}

TEST_CASE("matvec matches the adjoint pairing") {
  const std::size_t rows = 9, cols = 9;
  SplitMix64 rng(11);
  std::vector<cplx> a(rows * cols);
  for (auto& v : a) v = cplx{rng.sym(), rng.sym()};
  const auto x = random_array(cols, 21);
  const auto y = random_array(rows, 22);

  std::vector<cplx> ax(rows), aty(cols);
  kern::matvec(rows, cols, a.data(), x.data(), ax.data());
  kern::matvec_adj(rows, cols, a.data(), y.data(), aty.data());

  const kern::Ops& k = kern::ops();
  const cplx lhs = k.dotc(rows, ax.data(), y.data());
  const cplx rhs = k.dotc(cols, x.data(), aty.data());
  CHECK(std::abs(lhs - rhs) <= 1e-13);
}
