#pragma once

#include <cstddef>
#include <vector>

#include "ibmi/matrix.hpp"

namespace ibmi {

/// Lower-triangular Cholesky factor, A = L L^T. The strict upper triangle of
/// `l` is zero and the diagonal is strictly positive.
struct CholeskyFactor {
  DenseMatrix l;
  std::size_t dim() const noexcept { return l.rows(); }
};

/// Unit lower-triangular L and diagonal D with A = L D L^T.
struct LdlFactor {
  DenseMatrix l;
  std::vector<double> d;
  std::size_t dim() const noexcept { return l.rows(); }
};

// Blocked right-looking factorization. Throws NotPositiveDefinite(k) at the
// first non-positive pivot, DimensionMismatch for non-square input and
// InvalidArgument when `a` is not symmetric to 1e-12 relative.
CholeskyFactor cholesky(const DenseMatrix& a);

// Symmetric LDL^T without pivoting. ZeroPivot(k) when |d_k| < 1e-14 max|a|.
LdlFactor ldlt(const DenseMatrix& a);

// Solves (L L^T) X = B.
DenseMatrix chol_solve(const CholeskyFactor& f, const DenseMatrix& b);

// In-place triangular solves with the Cholesky factor on a block of right-hand sides.
void solve_lower(const DenseMatrix& l, MatrixView b);            // L X = B
void solve_lower_transposed(const DenseMatrix& l, MatrixView b); // L^T X = B

// Explicit inverse from the factorization and p triangular solve pairs;
// the result is exactly symmetric.
DenseMatrix spd_inverse(const DenseMatrix& a);
DenseMatrix spd_inverse(const CholeskyFactor& f);

}  // namespace ibmi
