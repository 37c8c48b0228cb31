#pragma once

#include <cstddef>
#include <vector>

#include "curvop/kernels.hpp"

namespace curvop {

// Row-major dense complex matrix.  Column j is the image of basis vector e_j.
struct CMat {
  std::size_t rows = 0, cols = 0;
  std::vector<cplx> a;

  CMat() = default;
  CMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, cplx{0.0, 0.0}) {}

  cplx& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static CMat identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

CMat adjoint(const CMat& m);
CMat matmul(const CMat& x, const CMat& y);
CMat operator+(const CMat& x, const CMat& y);
CMat operator-(const CMat& x, const CMat& y);
CMat operator*(cplx s, const CMat& x);
std::vector<cplx> matvec(const CMat& m, const std::vector<cplx>& x);
std::vector<cplx> matvec_adj(const CMat& m, const std::vector<cplx>& x);
double frobenius(const CMat& m);
double max_abs(const CMat& m);

// ---- Hermitian eigendecomposition (cyclic complex Jacobi) -----------------

struct HermEig {
  std::vector<double> values;  // descending
  CMat vectors;                // column k is the eigenvector of values[k]
};

// Input must be Hermitian up to roundoff; the strictly lower triangle is
// taken as the conjugate of the upper one.
HermEig hermitian_eig(const CMat& h);

// ---- Singular values (one-sided complex Jacobi) ----------------------------

// Descending singular values.  One-sided Jacobi keeps tiny singular values at
// absolute accuracy ~eps*sigma_max, which the rank thresholds rely on.
std::vector<double> singular_values(const CMat& m);
double spectral_norm(const CMat& m);

// ---- LU with partial pivoting ----------------------------------------------

struct LuFactors {
  CMat lu;                      // packed L (unit diagonal) and U
  std::vector<std::size_t> piv; // row permutation
};

LuFactors lu_factor(const CMat& m);                              // NumericError if singular
void lu_solve(const LuFactors& f, std::vector<cplx>& b);         // in place

// ---- Eigenvalues of a general complex matrix --------------------------------

// Householder Hessenberg reduction followed by shifted QR (Wilkinson shift,
// periodic exceptional shifts).  Eigenvalues only, unordered.
std::vector<cplx> eigenvalues(const CMat& m);
double spectral_radius(const CMat& m);

}  // namespace curvop
