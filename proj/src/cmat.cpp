#include "curvop/cmat.hpp"

#include <algorithm>
#include <cmath>

#include "curvop/errors.hpp"

namespace curvop {

CMat adjoint(const CMat& m) {
  CMat r(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      r.at(j, i) = std::conj(m.at(i, j));
  return r;
}

CMat matmul(const CMat& x, const CMat& y) {
  if (x.cols != y.rows) throw DomainError("matmul: inner dimensions differ");
  CMat r(x.rows, y.cols);
  const auto& k = kern::ops();
  // r_i += x_ij * y_j (row of y), accumulated row-wise with axpy.
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) {
      const cplx s = x.at(i, j);
      if (s != cplx{0.0, 0.0})
        k.axpy(y.cols, s, &y.a[j * y.cols], &r.a[i * r.cols]);
    }
  return r;
}

CMat operator+(const CMat& x, const CMat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw DomainError("matrix add: shape mismatch");
  CMat r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

CMat operator-(const CMat& x, const CMat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw DomainError("matrix sub: shape mismatch");
  CMat r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

CMat operator*(cplx s, const CMat& x) {
  CMat r = x;
  kern::ops().scal(r.a.size(), s, r.a.data());
  return r;
}

std::vector<cplx> matvec(const CMat& m, const std::vector<cplx>& x) {
  if (x.size() != m.cols) throw DomainError("matvec: dimension mismatch");
  std::vector<cplx> y(m.rows);
  kern::matvec(m.rows, m.cols, m.a.data(), x.data(), y.data());
  return y;
}

std::vector<cplx> matvec_adj(const CMat& m, const std::vector<cplx>& x) {
  if (x.size() != m.rows) throw DomainError("matvec_adj: dimension mismatch");
  std::vector<cplx> y(m.cols);
  kern::matvec_adj(m.rows, m.cols, m.a.data(), x.data(), y.data());
  return y;
}

double frobenius(const CMat& m) {
  return std::sqrt(kern::ops().norm2(m.a.size(), m.a.data()));
}

double max_abs(const CMat& m) {
  double v = 0.0;
  for (const cplx& z : m.a) v = std::max(v, std::abs(z));
  return v;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition: cyclic Jacobi with complex rotations.
// ---------------------------------------------------------------------------

HermEig hermitian_eig(const CMat& h) {
  if (h.rows != h.cols) throw DomainError("hermitian_eig: matrix not square");
  const std::size_t n = h.rows;
  CMat a = h;
  // Symmetrize against roundoff so the iteration sees an exactly Hermitian
  // matrix (diagonal forced real).
  for (std::size_t i = 0; i < n; ++i) {
    a.at(i, i) = cplx{a.at(i, i).real(), 0.0};
    for (std::size_t j = i + 1; j < n; ++j) {
      cplx v = 0.5 * (a.at(i, j) + std::conj(a.at(j, i)));
      a.at(i, j) = v;
      a.at(j, i) = std::conj(v);
    }
  }
  CMat v = CMat::identity(n);
  const double scale = std::max(frobenius(a), 1e-300);
  const double tol = 2e-15 * std::sqrt(static_cast<double>(n) + 1.0) * scale;

  for (int sweep = 0; sweep < 80; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        off += std::norm(a.at(p, q));
    if (std::sqrt(2.0 * off) <= tol) break;
    if (sweep == 79) throw NumericError("hermitian_eig: Jacobi did not converge");

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a.at(p, q);
        const double beta = std::abs(apq);
        if (beta <= 1e-18 * scale) continue;
        const double alpha = a.at(p, p).real();
        const double gamma = a.at(q, q).real();
        const cplx phase = apq / beta;
        // 2x2 block [[alpha, beta],[beta, gamma]] after factoring the phase;
        // rotation angle from tan(2*theta) = 2*beta / (alpha - gamma).
        double t;
        if (alpha == gamma) {
          t = 1.0;
        } else {
          const double tau = (alpha - gamma) / (2.0 * beta);
          t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx u12 = -s * phase;          // U = [[c, -s*phase],[s*conj(phase), c]]
        const cplx u21 = s * std::conj(phase);

        // A <- U^* A U: update rows p,q then columns p,q.
        for (std::size_t j = 0; j < n; ++j) {
          const cplx rp = a.at(p, j), rq = a.at(q, j);
          a.at(p, j) = c * rp + std::conj(u21) * rq;
          a.at(q, j) = std::conj(u12) * rp + c * rq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const cplx cp = a.at(i, p), cq = a.at(i, q);
          a.at(i, p) = c * cp + u21 * cq;
          a.at(i, q) = u12 * cp + c * cq;
          const cplx vp = v.at(i, p), vq = v.at(i, q);
          v.at(i, p) = c * vp + u21 * vq;
          v.at(i, q) = u12 * vp + c * vq;
        }
        a.at(p, q) = 0.0;
        a.at(q, p) = 0.0;
        a.at(p, p) = cplx{a.at(p, p).real(), 0.0};
        a.at(q, q) = cplx{a.at(q, q).real(), 0.0};
      }
    }
  }

  HermEig out;
  out.values.resize(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a.at(x, x).real() > a.at(y, y).real();
  });
  out.vectors = CMat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a.at(src, src).real();
    // Canonical phase: make the largest-magnitude component real positive so
    // emitted bases are stable run to run.
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::abs(v.at(i, src));
      if (m > best) { best = m; imax = i; }
    }
    cplx ph{1.0, 0.0};
    if (best > 0.0) ph = std::abs(v.at(imax, src)) / v.at(imax, src);
    for (std::size_t i = 0; i < n; ++i) out.vectors.at(i, k) = ph * v.at(i, src);
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-sided Jacobi singular values.
// ---------------------------------------------------------------------------

std::vector<double> singular_values(const CMat& m) {
  // Work on the taller orientation so columns live in the bigger space.
  CMat a = (m.rows >= m.cols) ? m : adjoint(m);
  const std::size_t rows = a.rows, n = a.cols;
  // Column-major copy for contiguous column kernels.
  std::vector<cplx> col(rows * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < rows; ++i)
      col[j * rows + i] = a.at(i, j);

  const auto& k = kern::ops();
  // Stopping threshold must sit above the roundoff floor of the recomputed
  // column dot products (~rows * eps relative), or rotations on noise never
  // terminate.  Columns whose mass has decayed 30 orders below the matrix
  // scale are exact zeros for any rank purpose; flooring them stops the
  // underflow spiral on rank-deficient inputs.
  const double rel_tol = 4e-15 * std::sqrt(static_cast<double>(rows) + 1.0);
  const double col_floor = 1e-60 * k.norm2(col.size(), col.data()) + 1e-300;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        cplx* cp = &col[p * rows];
        cplx* cq = &col[q * rows];
        const double app = k.norm2(rows, cp);
        if (app <= col_floor) { std::fill(cp, cp + rows, cplx{0.0, 0.0}); continue; }
        const double aqq = k.norm2(rows, cq);
        if (aqq <= col_floor) { std::fill(cq, cq + rows, cplx{0.0, 0.0}); continue; }
        const cplx apq = k.dotc(rows, cq, cp);  // <cq, cp> = cp^H cq
        const double beta = std::abs(apq);
        if (beta == 0.0 || beta <= rel_tol * std::sqrt(app) * std::sqrt(aqq)) continue;
        rotated = true;
        const cplx phase = apq / beta;
        double t;
        if (app == aqq) {
          t = 1.0;
        } else {
          const double tau = (app - aqq) / (2.0 * beta);
          t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx u12 = -s * phase;
        const cplx u21 = s * std::conj(phase);
        // [cp cq] <- [cp cq] * U
        for (std::size_t i = 0; i < rows; ++i) {
          const cplx xp = cp[i], xq = cq[i];
          cp[i] = c * xp + u21 * xq;
          cq[i] = u12 * xp + c * xq;
        }
      }
    }
    if (!rotated) break;
    if (sweep == 59) throw NumericError("singular_values: Jacobi did not converge");
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = std::sqrt(k.norm2(rows, &col[j * rows]));
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

double spectral_norm(const CMat& m) {
  if (m.a.empty()) return 0.0;
  return singular_values(m).front();
}

// ---------------------------------------------------------------------------
// LU with partial pivoting.
// ---------------------------------------------------------------------------

LuFactors lu_factor(const CMat& m) {
  if (m.rows != m.cols) throw DomainError("lu_factor: matrix not square");
  const std::size_t n = m.rows;
  LuFactors f{m, std::vector<std::size_t>(n)};
  CMat& a = f.lu;
  for (std::size_t kcol = 0; kcol < n; ++kcol) {
    std::size_t piv = kcol;
    double best = std::abs(a.at(kcol, kcol));
    for (std::size_t i = kcol + 1; i < n; ++i) {
      const double v = std::abs(a.at(i, kcol));
      if (v > best) { best = v; piv = i; }
    }
    if (best == 0.0) throw NumericError("lu_factor: singular matrix");
    f.piv[kcol] = piv;
    if (piv != kcol)
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(kcol, j), a.at(piv, j));
    const cplx d = a.at(kcol, kcol);
    for (std::size_t i = kcol + 1; i < n; ++i) {
      const cplx l = a.at(i, kcol) / d;
      a.at(i, kcol) = l;
      if (l != cplx{0.0, 0.0})
        kern::ops().axpy(n - kcol - 1, -l, &a.a[kcol * n + kcol + 1], &a.a[i * n + kcol + 1]);
    }
  }
  return f;
}

void lu_solve(const LuFactors& f, std::vector<cplx>& b) {
  const std::size_t n = f.lu.rows;
  if (b.size() != n) throw DomainError("lu_solve: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (f.piv[i] != i) std::swap(b[i], b[f.piv[i]]);
  for (std::size_t i = 1; i < n; ++i) {
    cplx s = b[i];
    s -= kern::ops().dotu(i, &f.lu.a[i * n], b.data());
    b[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    cplx s = b[ii];
    s -= kern::ops().dotu(n - ii - 1, &f.lu.a[ii * n + ii + 1], b.data() + ii + 1);
    b[ii] = s / f.lu.at(ii, ii);
  }
}

// ---------------------------------------------------------------------------
// General complex eigenvalues: Hessenberg + shifted QR.
// ---------------------------------------------------------------------------

namespace {

void hessenberg(CMat& a) {
  const std::size_t n = a.rows;
  if (n < 3) return;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    // Householder vector annihilating a[k+2.., k].
    double colnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) colnorm2 += std::norm(a.at(i, k));
    if (colnorm2 == 0.0) continue;
    const cplx x0 = a.at(k + 1, k);
    const double xn = std::sqrt(colnorm2);
    const cplx phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cplx{1.0, 0.0};
    const cplx alpha = -phase * xn;
    std::vector<cplx> w(n, cplx{0.0, 0.0});
    w[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) w[i] = a.at(i, k);
    double wn2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) wn2 += std::norm(w[i]);
    if (wn2 == 0.0) continue;
    // P = I - 2 w w^* / |w|^2 applied from both sides.
    for (std::size_t j = 0; j < n; ++j) {  // A <- P A
      cplx s{0.0, 0.0};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(w[i]) * a.at(i, j);
      s *= 2.0 / wn2;
      for (std::size_t i = k + 1; i < n; ++i) a.at(i, j) -= s * w[i];
    }
    for (std::size_t i = 0; i < n; ++i) {  // A <- A P
      cplx s{0.0, 0.0};
      for (std::size_t j = k + 1; j < n; ++j) s += a.at(i, j) * w[j];
      s *= 2.0 / wn2;
      for (std::size_t j = k + 1; j < n; ++j) a.at(i, j) -= s * std::conj(w[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) a.at(i, k) = 0.0;
  }
}

// Eigenvalue of [[a,b],[c,d]] closest to d (Wilkinson shift).
cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  const cplx tr = a + d;
  const cplx det = a * d - b * c;
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  const cplx l1 = 0.5 * (tr + disc);
  const cplx l2 = 0.5 * (tr - disc);
  return (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
}

}  // namespace

std::vector<cplx> eigenvalues(const CMat& m) {
  if (m.rows != m.cols) throw DomainError("eigenvalues: matrix not square");
  const std::size_t n = m.rows;
  std::vector<cplx> out;
  out.reserve(n);
  if (n == 0) return out;
  CMat h = m;
  hessenberg(h);

  const double scale = std::max(frobenius(h), 1e-300);
  std::size_t hi = n;  // active block is rows/cols [0, hi)
  int iter_since_deflate = 0;
  int total_iters = 0;
  const int max_total = 60 * static_cast<int>(n) + 200;

  std::vector<cplx> cs(n), sn(n);
  while (hi > 0) {
    if (hi == 1) { out.push_back(h.at(0, 0)); hi = 0; break; }
    // Deflate any negligible subdiagonal from the bottom of the block.
    std::size_t lo = hi - 1;
    while (lo > 0) {
      const double sub = std::abs(h.at(lo, lo - 1));
      // Absolute floor keeps blocks with a vanishing diagonal (nilpotent
      // inputs) deflatable; it perturbs eigenvalues no more than roundoff
      // already does.
      if (sub <= 1e-16 * (std::abs(h.at(lo, lo)) + std::abs(h.at(lo - 1, lo - 1))) + 1e-15 * scale) {
        h.at(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi - 1) {  // 1x1 converged
      out.push_back(h.at(hi - 1, hi - 1));
      --hi;
      iter_since_deflate = 0;
      continue;
    }

    if (++total_iters > max_total)
      throw NumericError("eigenvalues: QR iteration did not converge");
    cplx shift;
    if (++iter_since_deflate % 12 == 0) {
      // Exceptional shift breaks symmetry cycles (nilpotent Jordan blocks).
      const double mag = std::abs(h.at(hi - 1, hi - 2)) +
                         (hi >= 3 ? std::abs(h.at(hi - 2, hi - 3)) : 0.0);
      shift = cplx{0.75 * mag, 0.4375 * mag};
    } else {
      shift = wilkinson_shift(h.at(hi - 2, hi - 2), h.at(hi - 2, hi - 1),
                              h.at(hi - 1, hi - 2), h.at(hi - 1, hi - 1));
    }

    // Explicit single-shift QR step on the active block via Givens rotations.
    for (std::size_t i = lo; i < hi; ++i) h.at(i, i) -= shift;
    for (std::size_t i = lo; i + 1 < hi; ++i) {
      const cplx f = h.at(i, i), g = h.at(i + 1, i);
      const double fn = std::abs(f), gn = std::abs(g);
      if (gn == 0.0) { cs[i] = 1.0; sn[i] = 0.0; continue; }
      const double r = std::hypot(fn, gn);
      cs[i] = f / r;          // note: complex "cosine" carries f's phase
      sn[i] = g / r;
      // Apply G^* to rows i, i+1 (columns i..hi-1).
      for (std::size_t j = i; j < hi; ++j) {
        const cplx t1 = h.at(i, j), t2 = h.at(i + 1, j);
        h.at(i, j) = std::conj(cs[i]) * t1 + std::conj(sn[i]) * t2;
        h.at(i + 1, j) = -sn[i] * t1 + cs[i] * t2;
      }
    }
    for (std::size_t i = lo; i + 1 < hi; ++i) {
      // Apply G to columns i, i+1 (rows lo..min(i+2, hi-1)).
      const std::size_t rmax = std::min(i + 2, hi - 1);
      for (std::size_t r = lo; r <= rmax; ++r) {
        const cplx t1 = h.at(r, i), t2 = h.at(r, i + 1);
        h.at(r, i) = t1 * cs[i] + t2 * sn[i];
        h.at(r, i + 1) = -t1 * std::conj(sn[i]) + t2 * std::conj(cs[i]);
      }
    }
    for (std::size_t i = lo; i < hi; ++i) h.at(i, i) += shift;
  }
  return out;
}

double spectral_radius(const CMat& m) {
  double r = 0.0;
  for (const cplx& l : eigenvalues(m)) r = std::max(r, std::abs(l));
  return r;
}

}  // namespace curvop
