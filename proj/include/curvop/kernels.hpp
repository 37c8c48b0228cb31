#pragma once

#include <complex>
#include <cstddef>

namespace curvop {

using cplx = std::complex<double>;

namespace kern {

// Complex double-precision array kernels.  Every entry point has a scalar
// reference implementation; on x86-64 an AVX2+FMA variant is picked once at
// startup when the CPU supports it.  The two variants are equivalence-tested
// against each other (FMA contraction reorders roundoff, so the tests use a
// tolerance, not bit equality).
struct Ops {
  const char* name;
  cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);          // sum x[i] * conj(y[i])
  cplx (*dotu)(std::size_t n, const cplx* x, const cplx* y);          // sum x[i] * y[i]
  double (*norm2)(std::size_t n, const cplx* x);                      // sum |x[i]|^2
  void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);        // y += a * x
  void (*axpy_conj)(std::size_t n, cplx a, const cplx* x, cplx* y);   // y += a * conj(x)
  void (*scal)(std::size_t n, cplx a, cplx* x);                       // x *= a
};

const Ops& scalar_ops();
bool avx2_supported();
const Ops& avx2_ops();   // only valid to call through when avx2_supported()
const Ops& ops();        // runtime-selected variant

// Row-major dense products on top of the kernel set.
// y = A x            (A is rows x cols)
void matvec(std::size_t rows, std::size_t cols, const cplx* a, const cplx* x, cplx* y);
// y = A^* x          (conjugate transpose; y has cols entries)
void matvec_adj(std::size_t rows, std::size_t cols, const cplx* a, const cplx* x, cplx* y);

}  // namespace kern
}  // namespace curvop
