#include "ibmi/factor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ibmi/gemm.hpp"

#include "fpmode.hpp"

#ifdef IBMI_HAVE_CBLAS
#include <cblas.h>
#endif

namespace ibmi {

namespace {

constexpr std::size_t kPanel = 96;

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
  return s;
}

void require_square(const DenseMatrix& a, const char* op) {
  if (!a.is_square())
    throw DimensionMismatch(std::string(op) + ": matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", expected square");
}

// op(L) X = B in place through BLAS; false when the native loops should run.
bool blas_trsm(const DenseMatrix& l, MatrixView b, bool transposed) {
#ifdef IBMI_HAVE_CBLAS
  if (gemm_backend() == GemmBackend::Blas && b.rows > 0 && b.cols > 0) {
    cblas_dtrsm(CblasRowMajor, CblasLeft, CblasLower, transposed ? CblasTrans : CblasNoTrans, CblasNonUnit,
                static_cast<int>(b.rows), static_cast<int>(b.cols), 1.0, l.data(), static_cast<int>(l.cols()),
                b.data, static_cast<int>(b.ld));
    return true;
  }
#else
  (void)l, (void)b, (void)transposed;
#endif
  return false;
}

}  // namespace

CholeskyFactor cholesky(const DenseMatrix& a) {
  require_square(a, "cholesky");
  if (!is_symmetric(a, 1e-12)) throw InvalidArgument("cholesky: matrix is not symmetric");
  const detail::FlushSubnormals ftz;
  const std::size_t n = a.rows();
  DenseMatrix l = a;
  MatrixView lv = l.view();

  for (std::size_t k0 = 0; k0 < n; k0 += kPanel) {
    const std::size_t kb = std::min(kPanel, n - k0);
    // Diagonal block; earlier panels are already folded in by the trailing updates.
    for (std::size_t i = k0; i < k0 + kb; ++i) {
      double* li = &lv(i, 0);
      for (std::size_t j = k0; j <= i; ++j) {
        const double s = li[j] - dot(li + k0, &lv(j, k0), j - k0);
        if (i == j) {
          if (!(s > 0.0) || !std::isfinite(s)) throw NotPositiveDefinite(i);
          li[i] = std::sqrt(s);
        } else {
          li[j] = s / lv(j, j);
        }
      }
    }
    const std::size_t rest = n - k0 - kb;
    if (rest == 0) break;
    // Panel below the diagonal block: L21 L11^T = A21.
#ifdef IBMI_HAVE_CBLAS
    if (gemm_backend() == GemmBackend::Blas) {
      cblas_dtrsm(CblasRowMajor, CblasRight, CblasLower, CblasTrans, CblasNonUnit, static_cast<int>(rest),
                  static_cast<int>(kb), 1.0, &lv(k0, k0), static_cast<int>(lv.ld), &lv(k0 + kb, k0),
                  static_cast<int>(lv.ld));
    } else
#endif
    for (std::size_t i = k0 + kb; i < n; ++i) {
      double* li = &lv(i, 0);
      for (std::size_t j = k0; j < k0 + kb; ++j)
        li[j] = (li[j] - dot(li + k0, &lv(j, k0), j - k0)) / lv(j, j);
    }
    // Trailing lower triangle, one block row at a time.
    const std::size_t t0 = k0 + kb;
    for (std::size_t i0 = t0; i0 < n; i0 += kPanel) {
      const std::size_t ib = std::min(kPanel, n - i0);
      const std::size_t width = i0 + ib - t0;
      gemm(-1.0, lv.block(i0, k0, ib, kb), Trans::No, lv.block(t0, k0, width, kb), Trans::Yes, 1.0,
           lv.block(i0, t0, ib, width));
    }
  }
  for (std::size_t i = 0; i < n; ++i) std::fill(&lv(i, 0) + i + 1, &lv(i, 0) + n, 0.0);
  return {std::move(l)};
}

LdlFactor ldlt(const DenseMatrix& a) {
  require_square(a, "ldlt");
  const std::size_t n = a.rows();
  const double floor = 1e-14 * max_abs(a);
  DenseMatrix l = DenseMatrix::identity(n);
  // w(j, k) = l(j, k) * d(k), kept row-major so the inner products are contiguous.
  DenseMatrix w(n, n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    double* li = &l(i, 0);
    for (std::size_t j = 0; j < i; ++j) li[j] = (a(i, j) - dot(li, &w(j, 0), j)) / d[j];
    for (std::size_t k = 0; k < i; ++k) w(i, k) = li[k] * d[k];
    const double di = a(i, i) - dot(li, &w(i, 0), i);
    if (!(std::abs(di) >= floor) || di == 0.0) throw ZeroPivot(i);
    d[i] = di;
  }
  return {std::move(l), std::move(d)};
}

void solve_lower(const DenseMatrix& l, MatrixView b) {
  const std::size_t n = l.rows();
  if (b.rows != n) throw DimensionMismatch("solve_lower: right-hand side has wrong row count");
  const detail::FlushSubnormals ftz;
  if (blas_trsm(l, b, false)) return;
  const std::size_t r = b.cols;
  for (std::size_t i0 = 0; i0 < n; i0 += kPanel) {
    const std::size_t ib = std::min(kPanel, n - i0);
    for (std::size_t i = i0; i < i0 + ib; ++i) {
      double* bi = &b(i, 0);
      for (std::size_t t = i0; t < i; ++t) {
        const double f = l(i, t);
        if (f == 0.0) continue;
        const double* bt = &b(t, 0);
        for (std::size_t c = 0; c < r; ++c) bi[c] -= f * bt[c];
      }
      const double inv = 1.0 / l(i, i);
      for (std::size_t c = 0; c < r; ++c) bi[c] *= inv;
    }
    const std::size_t below = n - i0 - ib;
    if (below > 0)
      gemm(-1.0, l.view().block(i0 + ib, i0, below, ib), Trans::No, b.block(i0, 0, ib, r), Trans::No,
           1.0, b.block(i0 + ib, 0, below, r));
  }
}

void solve_lower_transposed(const DenseMatrix& l, MatrixView b) {
  const std::size_t n = l.rows();
  if (b.rows != n)
    throw DimensionMismatch("solve_lower_transposed: right-hand side has wrong row count");
  const detail::FlushSubnormals ftz;
  if (blas_trsm(l, b, true)) return;
  const std::size_t r = b.cols;
  const std::size_t nblocks = (n + kPanel - 1) / kPanel;
  for (std::size_t blk = nblocks; blk-- > 0;) {
    const std::size_t i0 = blk * kPanel;
    const std::size_t ib = std::min(kPanel, n - i0);
    for (std::size_t i = i0 + ib; i-- > i0;) {
      double* bi = &b(i, 0);
      for (std::size_t t = i + 1; t < i0 + ib; ++t) {
        const double f = l(t, i);
        if (f == 0.0) continue;
        const double* bt = &b(t, 0);
        for (std::size_t c = 0; c < r; ++c) bi[c] -= f * bt[c];
      }
      const double inv = 1.0 / l(i, i);
      for (std::size_t c = 0; c < r; ++c) bi[c] *= inv;
    }
    if (i0 > 0)
      gemm(-1.0, l.view().block(i0, 0, ib, i0), Trans::Yes, b.block(i0, 0, ib, r), Trans::No, 1.0,
           b.block(0, 0, i0, r));
  }
}

DenseMatrix chol_solve(const CholeskyFactor& f, const DenseMatrix& b) {
  if (f.dim() != b.rows())
    throw DimensionMismatch("chol_solve: factor is " + std::to_string(f.dim()) +
                            "-dimensional, right-hand side has " + std::to_string(b.rows()) +
                            " rows");
  DenseMatrix x = b;
  solve_lower(f.l, x.view());
  solve_lower_transposed(f.l, x.view());
  return x;
}

DenseMatrix spd_inverse(const CholeskyFactor& f) {
  DenseMatrix x = chol_solve(f, DenseMatrix::identity(f.dim()));
  x.symmetrize();
  return x;
}

DenseMatrix spd_inverse(const DenseMatrix& a) { return spd_inverse(cholesky(a)); }

}  // namespace ibmi
