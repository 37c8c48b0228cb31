#include "curvop/kernels.hpp"

namespace curvop::kern {

bool avx2_supported() {
#if (defined(__x86_64__) || defined(__i386__)) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& ops() {
  static const Ops& selected = avx2_supported() ? avx2_ops() : scalar_ops();
  return selected;
}

void matvec(std::size_t rows, std::size_t cols, const cplx* a, const cplx* x, cplx* y) {
  const Ops& k = ops();
  for (std::size_t i = 0; i < rows; ++i)
    y[i] = k.dotu(cols, a + i * cols, x);
}

void matvec_adj(std::size_t rows, std::size_t cols, const cplx* a, const cplx* x, cplx* y) {
  // (A^* x)_j = sum_i conj(A_ij) x_i:  accumulate x_i * conj(row_i) into y.
  const Ops& k = ops();
  for (std::size_t j = 0; j < cols; ++j) y[j] = cplx{0.0, 0.0};
  for (std::size_t i = 0; i < rows; ++i)
    k.axpy_conj(cols, x[i], a + i * cols, y);
}

}  // namespace curvop::kern
