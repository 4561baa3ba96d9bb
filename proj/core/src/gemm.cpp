#include "ibmi/gemm.hpp"

#include "fpmode.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <vector>

#ifdef IBMI_HAVE_CBLAS
#include <cblas.h>
#endif

namespace ibmi {

namespace {

std::atomic<std::size_t> g_tile{64};
#ifdef IBMI_HAVE_CBLAS
std::atomic<GemmBackend> g_backend{GemmBackend::Blas};
#else
std::atomic<GemmBackend> g_backend{GemmBackend::Native};
#endif

std::size_t op_rows(ConstMatrixView m, Trans t) { return t == Trans::No ? m.rows : m.cols; }
std::size_t op_cols(ConstMatrixView m, Trans t) { return t == Trans::No ? m.cols : m.rows; }

// Copies the (r0..r0+nr, c0..c0+nc) block of op(M) into a dense nr x nc buffer.
void pack(ConstMatrixView m, Trans t, std::size_t r0, std::size_t c0, std::size_t nr,
          std::size_t nc, double* out) {
  if (t == Trans::No) {
    for (std::size_t i = 0; i < nr; ++i) std::copy_n(&m(r0 + i, c0), nc, out + i * nc);
  } else {
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) out[i * nc + j] = m(c0 + j, r0 + i);
  }
}

// c[nr x nc] += a[nr x nk] * b[nk x nc], all packed, c with leading dim ldc.
void micro_tile(const double* a, const double* b, double* c, std::size_t ldc, std::size_t nr,
                std::size_t nk, std::size_t nc) {
  std::size_t i = 0;
  for (; i + 4 <= nr; i += 4) {
    double* c0 = c + i * ldc;
    double* c1 = c0 + ldc;
    double* c2 = c1 + ldc;
    double* c3 = c2 + ldc;
    for (std::size_t k = 0; k < nk; ++k) {
      const double a0 = a[i * nk + k];
      const double a1 = a[(i + 1) * nk + k];
      const double a2 = a[(i + 2) * nk + k];
      const double a3 = a[(i + 3) * nk + k];
      const double* bk = b + k * nc;
      for (std::size_t j = 0; j < nc; ++j) {
        const double bv = bk[j];
        c0[j] += a0 * bv;
        c1[j] += a1 * bv;
        c2[j] += a2 * bv;
        c3[j] += a3 * bv;
      }
    }
  }
  for (; i < nr; ++i) {
    double* ci = c + i * ldc;
    for (std::size_t k = 0; k < nk; ++k) {
      const double av = a[i * nk + k];
      const double* bk = b + k * nc;
      for (std::size_t j = 0; j < nc; ++j) ci[j] += av * bk[j];
    }
  }
}

void gemm_native(double alpha, ConstMatrixView a, Trans ta, ConstMatrixView b, Trans tb,
                 double beta, MatrixView c) {
  const std::size_t m = c.rows, n = c.cols, kdim = op_cols(a, ta);
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = &c(i, 0);
    if (beta == 0.0) {
      std::fill_n(ci, n, 0.0);
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < n; ++j) ci[j] *= beta;
    }
  }
  if (alpha == 0.0 || kdim == 0) return;

  const std::size_t tile = std::max<std::size_t>(g_tile.load(std::memory_order_relaxed), 4);
  const std::size_t tk = tile, tn = 4 * tile;
  std::vector<double> apack(tile * tk), bpack(tk * tn), cbuf(tile * tn);
  for (std::size_t j0 = 0; j0 < n; j0 += tn) {
    const std::size_t nc = std::min(tn, n - j0);
    for (std::size_t k0 = 0; k0 < kdim; k0 += tk) {
      const std::size_t nk = std::min(tk, kdim - k0);
      pack(b, tb, k0, j0, nk, nc, bpack.data());
      for (std::size_t i0 = 0; i0 < m; i0 += tile) {
        const std::size_t nr = std::min(tile, m - i0);
        pack(a, ta, i0, k0, nr, nk, apack.data());
        std::fill_n(cbuf.data(), nr * nc, 0.0);
        micro_tile(apack.data(), bpack.data(), cbuf.data(), nc, nr, nk, nc);
        for (std::size_t i = 0; i < nr; ++i) {
          double* ci = &c(i0 + i, j0);
          const double* bi = cbuf.data() + i * nc;
          for (std::size_t j = 0; j < nc; ++j) ci[j] += alpha * bi[j];
        }
      }
    }
  }
}

}  // namespace

void set_matmul_tile_size(std::size_t tile) {
  if (tile == 0) throw InvalidArgument("matmul tile size must be positive");
  g_tile.store(tile, std::memory_order_relaxed);
}
std::size_t matmul_tile_size() { return g_tile.load(std::memory_order_relaxed); }

bool blas_available() {
#ifdef IBMI_HAVE_CBLAS
  return true;
#else
  return false;
#endif
}

void set_gemm_backend(GemmBackend backend) {
  if (backend == GemmBackend::Blas && !blas_available())
    throw InvalidArgument("library was built without a BLAS backend");
  g_backend.store(backend, std::memory_order_relaxed);
}
GemmBackend gemm_backend() { return g_backend.load(std::memory_order_relaxed); }

void gemm(double alpha, ConstMatrixView a, Trans ta, ConstMatrixView b, Trans tb, double beta,
          MatrixView c) {
  if (op_cols(a, ta) != op_rows(b, tb) || op_rows(a, ta) != c.rows || op_cols(b, tb) != c.cols)
    throw DimensionMismatch("gemm: op(A) is " + std::to_string(op_rows(a, ta)) + "x" +
                            std::to_string(op_cols(a, ta)) + ", op(B) is " +
                            std::to_string(op_rows(b, tb)) + "x" + std::to_string(op_cols(b, tb)) +
                            ", C is " + std::to_string(c.rows) + "x" + std::to_string(c.cols));
  if (c.rows == 0 || c.cols == 0) return;
  const detail::FlushSubnormals ftz;
#ifdef IBMI_HAVE_CBLAS
  if (gemm_backend() == GemmBackend::Blas) {
    const auto k = static_cast<blasint>(op_cols(a, ta));
    if (k == 0) {
      gemm_native(alpha, a, ta, b, tb, beta, c);
      return;
    }
    cblas_dgemm(CblasRowMajor, ta == Trans::No ? CblasNoTrans : CblasTrans,
                tb == Trans::No ? CblasNoTrans : CblasTrans, static_cast<blasint>(c.rows),
                static_cast<blasint>(c.cols), k, alpha, a.data, static_cast<blasint>(a.ld), b.data,
                static_cast<blasint>(b.ld), beta, c.data, static_cast<blasint>(c.ld));
    return;
  }
#endif
  gemm_native(alpha, a, ta, b, tb, beta, c);
}

DenseMatrix matmul(const DenseMatrix& a, Trans ta, const DenseMatrix& b, Trans tb) {
  const std::size_t m = ta == Trans::No ? a.rows() : a.cols();
  const std::size_t n = tb == Trans::No ? b.cols() : b.rows();
  const std::size_t ka = ta == Trans::No ? a.cols() : a.rows();
  const std::size_t kb = tb == Trans::No ? b.rows() : b.cols();
  if (ka != kb)
    throw DimensionMismatch("matmul: inner dimensions " + std::to_string(ka) + " and " +
                            std::to_string(kb) + " differ");
  DenseMatrix c(m, n);
  gemm(1.0, a.view(), ta, b.view(), tb, 0.0, c.view());
  return c;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  return matmul(a, Trans::No, b, Trans::No);
}

}  // namespace ibmi
