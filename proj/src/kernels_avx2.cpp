// AVX2+FMA kernel variant.  Compiled with -mavx2 -mfma on x86-64 only; the
// dispatcher never hands out these entry points unless the running CPU
// reports both features.  Complex numbers are processed two at a time from
// their natural interleaved [re, im] layout.

#include "curvop/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__) || defined(_M_X64)

#include <immintrin.h>

namespace curvop::kern {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Signed horizontal sum: odd lanes added, even lanes subtracted.
inline double hsum_oddminus(__m256d v) {
  __m256d signed_v = _mm256_addsub_pd(_mm256_setzero_pd(), v);
  return hsum(signed_v);
}

// Signed horizontal sum: even lanes added, odd lanes subtracted.
inline double hsum_evenminus(__m256d v) {
  return -hsum_oddminus(v);
}

cplx v_dotc(std::size_t n, const cplx* x, const cplx* y) {
  const double* px = reinterpret_cast<const double*>(x);
  const double* py = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    __m256d vys = _mm256_permute_pd(vy, 0x5);     // [yi, yr] pairs
    acc_re = _mm256_fmadd_pd(vx, vy, acc_re);     // xr*yr | xi*yi
    acc_im = _mm256_fmadd_pd(vx, vys, acc_im);    // xr*yi | xi*yr
  }
  double re = hsum(acc_re);
  double im = hsum_oddminus(acc_im);              // xi*yr - xr*yi
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xi * yr - xr * yi;
  }
  return {re, im};
}

cplx v_dotu(std::size_t n, const cplx* x, const cplx* y) {
  const double* px = reinterpret_cast<const double*>(x);
  const double* py = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    __m256d vys = _mm256_permute_pd(vy, 0x5);
    acc_re = _mm256_fmadd_pd(vx, vy, acc_re);     // xr*yr | xi*yi
    acc_im = _mm256_fmadd_pd(vx, vys, acc_im);    // xr*yi | xi*yr
  }
  double re = hsum_evenminus(acc_re);             // xr*yr - xi*yi
  double im = hsum(acc_im);                       // xr*yi + xi*yr
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

double v_norm2(std::size_t n, const cplx* x) {
  const double* px = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    acc = _mm256_fmadd_pd(vx, vx, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

// r = a * x for one __m256d of two complex values.
inline __m256d cmul_broadcast(__m256d ar, __m256d ai, __m256d vx) {
  __m256d vxs = _mm256_permute_pd(vx, 0x5);       // [xi, xr]
  __m256d t = _mm256_mul_pd(ai, vxs);             // [ai*xi, ai*xr]
  return _mm256_fmaddsub_pd(ar, vx, t);           // [ar*xr - ai*xi, ar*xi + ai*xr]
}

void v_axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    vy = _mm256_add_pd(vy, cmul_broadcast(ar, ai, vx));
    _mm256_storeu_pd(py + 2 * i, vy);
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cplx{a.real() * xr - a.imag() * xi, a.real() * xi + a.imag() * xr};
  }
}

void v_axpy_conj(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_xor_pd(_mm256_loadu_pd(px + 2 * i), conj_mask);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    vy = _mm256_add_pd(vy, cmul_broadcast(ar, ai, vx));
    _mm256_storeu_pd(py + 2 * i, vy);
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = -x[i].imag();
    y[i] += cplx{a.real() * xr - a.imag() * xi, a.real() * xi + a.imag() * xr};
  }
}

void v_scal(std::size_t n, cplx a, cplx* x) {
  double* px = reinterpret_cast<double*>(x);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    _mm256_storeu_pd(px + 2 * i, cmul_broadcast(ar, ai, vx));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    x[i] = cplx{a.real() * xr - a.imag() * xi, a.real() * xi + a.imag() * xr};
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{"avx2", v_dotc, v_dotu, v_norm2, v_axpy, v_axpy_conj, v_scal};
  return ops;
}

}  // namespace curvop::kern

#else  // non-x86: never selected, forward to scalar so the symbol exists

namespace curvop::kern {
const Ops& avx2_ops() { return scalar_ops(); }
}

#endif
