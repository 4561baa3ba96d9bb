#pragma once

#include <cstddef>

#include "ibmi/matrix.hpp"

namespace ibmi {

enum class Trans { No, Yes };

enum class GemmBackend {
  Native,  // cache-tiled loops in this library
  Blas,    // cblas_dgemm, when the library was built with a BLAS
};

// Process-wide matmul settings. Results are tile-size independent up to
// rounding; the backend switch exists for benchmarking and cross-checks.
void set_matmul_tile_size(std::size_t tile);
std::size_t matmul_tile_size();
void set_gemm_backend(GemmBackend backend);
GemmBackend gemm_backend();
bool blas_available();

// C := alpha * op(A) * op(B) + beta * C
void gemm(double alpha, ConstMatrixView a, Trans ta, ConstMatrixView b, Trans tb, double beta,
          MatrixView c);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const DenseMatrix& a, Trans ta, const DenseMatrix& b, Trans tb);

}  // namespace ibmi
