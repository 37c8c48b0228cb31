#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "curvop/cmat.hpp"
#include "curvop/errors.hpp"
#include "helpers.hpp"

using namespace curvop;
using testutil::dft;
using testutil::diag;
using testutil::random_matrix;

namespace {

// A = V D V^H for a unitary V and real diagonal D.
CMat conjugate_diag(const CMat& v, const std::vector<double>& d) {
  CMat dm(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) dm.at(i, i) = d[i];
  return matmul(v, matmul(dm, adjoint(v)));
}

}  // namespace

TEST_CASE("hermitian_eig recovers a known spectrum") {
  const std::vector<double> spectrum{3.0, 2.0, 1.0, 0.0};
  const CMat a = conjugate_diag(dft(4), spectrum);
  const HermEig eig = hermitian_eig(a);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(eig.values[i] - spectrum[i]) <= 1e-13);

  // Residual A v = lambda v and orthonormality of the eigenbasis.
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<cplx> v(4);
    for (std::size_t i = 0; i < 4; ++i) v[i] = eig.vectors.at(i, k);
    const auto av = matvec(a, v);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(av[i] - eig.values[k] * v[i]) <= 1e-12);
    for (std::size_t l = 0; l < 4; ++l) {
      cplx dot{0, 0};
      for (std::size_t i = 0; i < 4; ++i)
        dot += eig.vectors.at(i, k) * std::conj(eig.vectors.at(i, l));
      CHECK(std::abs(dot - (k == l ? cplx{1, 0} : cplx{0, 0})) <= 1e-12);
    }
  }
}

TEST_CASE("hermitian_eig on random Hermitian matrices") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    CMat g = random_matrix(11, seed);
    CMat a = matmul(g, adjoint(g));  // Hermitian PSD
    const HermEig eig = hermitian_eig(a);
    for (std::size_t k = 0; k + 1 < eig.values.size(); ++k)
      CHECK(eig.values[k] >= eig.values[k + 1]);  // sorted descending
    for (std::size_t k = 0; k < a.rows; ++k) {
      std::vector<cplx> v(a.rows);
      for (std::size_t i = 0; i < a.rows; ++i) v[i] = eig.vectors.at(i, k);
      const auto av = matvec(a, v);
      double resid = 0;
      for (std::size_t i = 0; i < a.rows; ++i) resid += std::norm(av[i] - eig.values[k] * v[i]);
      CHECK(std::sqrt(resid) <= 1e-11 * std::max(1.0, eig.values.front()));
    }
  }
}

TEST_CASE("singular values: diagonal, unitary conjugation, exact nulls") {
  const auto sv = singular_values(diag({0.5, 0.25}));
  CHECK(std::abs(sv[0] - 0.5) <= 1e-14);
  CHECK(std::abs(sv[1] - 0.25) <= 1e-14);

  // sigma(F D F^H) = diag of D for unitary F.
  const CMat f = dft(5);
  CMat d(5, 5);
  const std::vector<double> s{2.0, 1.5, 1.0, 0.5, 0.0};
  for (std::size_t i = 0; i < 5; ++i) d.at(i, i) = s[i];
  const CMat a = matmul(f, matmul(d, adjoint(f)));
  const auto sv2 = singular_values(a);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(sv2[i] - s[i]) <= 1e-13);
  // The exact null direction stays numerically zero (one-sided Jacobi keeps
  // absolute accuracy for small singular values).
  CHECK(sv2[4] <= 1e-13);

  CHECK(std::abs(spectral_norm(diag({0.5, 0.25})) - 0.5) <= 1e-14);
}

TEST_CASE("LU factor/solve") {
  const CMat a = random_matrix(9, 31);
  const auto x = [&] {
    SplitMix64 rng(77);
    std::vector<cplx> v(9);
    for (auto& z : v) z = cplx{rng.sym(), rng.sym()};
    return v;
  }();
  auto b = matvec(a, x);
  const LuFactors lu = lu_factor(a);
  lu_solve(lu, b);
  for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(b[i] - x[i]) <= 1e-11);

  CMat singular(2, 2);
  singular.at(0, 0) = 1.0;
  singular.at(0, 1) = 1.0;  // second row zero
  CHECK_THROWS_AS((void)lu_factor(singular), NumericError);
}

TEST_CASE("general eigenvalues: known spectra") {
  // Diagonal conjugated by a unitary.
  const std::vector<double> spectrum{0.9, -0.4, 0.1};
  CMat d(3, 3);
  for (std::size_t i = 0; i < 3; ++i) d.at(i, i) = spectrum[i];
  const CMat a = matmul(dft(3), matmul(d, adjoint(dft(3))));
  auto eigs = eigenvalues(a);
  std::sort(eigs.begin(), eigs.end(), [](cplx x, cplx y) { return x.real() > y.real(); });
  REQUIRE(eigs.size() == 3);
  CHECK(std::abs(eigs[0] - cplx{0.9, 0.0}) <= 1e-12);
  CHECK(std::abs(eigs[1] - cplx{0.1, 0.0}) <= 1e-12);
  CHECK(std::abs(eigs[2] - cplx{-0.4, 0.0}) <= 1e-12);

  // Companion matrix of (z - 0.5)(z - 0.5i)(z + 0.25).
  const cplx r1{0.5, 0.0}, r2{0.0, 0.5}, r3{-0.25, 0.0};
  const cplx c2 = -(r1 + r2 + r3);
  const cplx c1 = r1 * r2 + r1 * r3 + r2 * r3;
  const cplx c0 = -(r1 * r2 * r3);
  CMat comp(3, 3);
  comp.at(0, 2) = -c0;
  comp.at(1, 2) = -c1;
  comp.at(2, 2) = -c2;
  comp.at(1, 0) = 1.0;
  comp.at(2, 1) = 1.0;
  auto roots = eigenvalues(comp);
  for (cplx want : {r1, r2, r3}) {
    double best = 1e9;
    for (cplx got : roots) best = std::min(best, std::abs(got - want));
    CHECK(best <= 1e-10);
  }
}

TEST_CASE("general eigenvalues: stress over matrix families") {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    CMat a;
    switch (trial % 4) {
      case 0: {  // scaled random matrix
        a = random_matrix(n, rng.next());
        const double top = spectral_norm(a);
        kern::ops().scal(a.a.size(), cplx{0.95 / top, 0.0}, a.a.data());
        break;
      }
      case 1: {  // unitary (eigenvectors of a random Hermitian)
        CMat g = random_matrix(n, rng.next());
        a = hermitian_eig(matmul(g, adjoint(g))).vectors;
        break;
      }
      case 2: {  // shifted nilpotent Jordan block
        a = CMat(n, n);
        const cplx mu{0.4 * rng.sym(), 0.4 * rng.sym()};
        for (std::size_t k = 0; k < n; ++k) {
          a.at(k, k) = mu;
          if (k + 1 < n) a.at(k + 1, k) = 0.5;
        }
        break;
      }
      default: {  // upper triangular with well-separated diagonal
        a = random_matrix(n, rng.next());
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < i; ++j) a.at(i, j) = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          a.at(i, i) = cplx{0.3 * static_cast<double>(i) - 0.8, 0.2 * rng.sym()};
        break;
      }
    }
    const auto eigs = eigenvalues(a);
    REQUIRE(eigs.size() == n);
    // Eigenvalue sum equals the trace.
    cplx trace{0, 0}, sum{0, 0};
    for (std::size_t i = 0; i < n; ++i) trace += a.at(i, i);
    for (cplx e : eigs) sum += e;
    CHECK(std::abs(sum - trace) <= 1e-9 * (1.0 + std::abs(trace)));
    // No eigenvalue escapes the spectral norm.
    const double top = spectral_norm(a);
    for (cplx e : eigs) CHECK(std::abs(e) <= top + 1e-9);
    // Triangular case: the diagonal is the spectrum.
    if (trial % 4 == 3) {
      for (std::size_t i = 0; i < n; ++i) {
        double best = 1e9;
        for (cplx e : eigs) best = std::min(best, std::abs(e - a.at(i, i)));
        CHECK(best <= 1e-7);
      }
    }
  }
}

TEST_CASE("general eigenvalues: hard shapes") {
  // Nilpotent Jordan block: all eigenvalues 0; roundoff spreads them on a
  // circle of radius ~eps^(1/n), far below the purity threshold.
  CMat j(8, 8);
  for (std::size_t k = 0; k + 1 < 8; ++k) j.at(k + 1, k) = 1.0;
  CHECK(spectral_radius(j) <= 0.2);

  // DFT eigenvalues are 4th roots of unity with known multiplicities
  // (n = 8: three 1, one i, two -1, two -i).
  auto eigs = eigenvalues(testutil::dft(8));
  int mult[4] = {0, 0, 0, 0};
  const cplx roots[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (cplx e : eigs) {
    CHECK(std::abs(std::abs(e) - 1.0) <= 1e-10);
    for (int r = 0; r < 4; ++r)
      if (std::abs(e - roots[r]) <= 1e-8) ++mult[r];
  }
  CHECK(mult[0] == 3);
  CHECK(mult[1] == 1);
  CHECK(mult[2] == 2);
  CHECK(mult[3] == 2);

  CHECK(std::abs(spectral_radius(diag({0.3, 0.9})) - 0.9) <= 1e-13);
}
