#include "ibmi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ibmi/factor.hpp"
#include "ibmi/gemm.hpp"
#include "ibmi/partition.hpp"
#include "ibmi/solver.hpp"

namespace ibmi {

namespace {

void require_two_set(const DenseMatrix& a, const IndexList& i1, const IndexList& i2) {
  if (!a.is_square()) throw DimensionMismatch("matrix is not square");
  if (i1.empty() || i2.empty()) throw InvalidArgument("both index sets must be nonempty");
  if (i1.size() + i2.size() != a.rows())
    throw InvalidArgument("index sets must split the matrix without overlap");
  Partition part{a.rows(), {i1, i2}, 0.0, Ordering::CUSTOM};
  validate(part);
}

// A_2^{-1} A_21 A_1^{-1} A_12
DenseMatrix schur_map(const DenseMatrix& a, const IndexList& i1, const IndexList& i2) {
  const DenseMatrix w1 = chol_solve(cholesky(gather(a, i1, i1)), gather(a, i1, i2));
  const DenseMatrix w2 = chol_solve(cholesky(gather(a, i2, i2)), gather(a, i2, i1));
  return matmul(w2, w1);
}

std::uint64_t checked_mul(std::uint64_t x, std::uint64_t y) {
  if (y != 0 && x > std::numeric_limits<std::uint64_t>::max() / y)
    throw InvalidArgument("flop count overflows 64 bits");
  return x * y;
}

std::uint64_t checked_add(std::uint64_t x, std::uint64_t y) {
  if (x > std::numeric_limits<std::uint64_t>::max() - y) throw InvalidArgument("flop count overflows 64 bits");
  return x + y;
}

std::uint64_t cube(std::uint64_t x) { return checked_mul(checked_mul(x, x), x); }

}  // namespace

ContractionReport contraction_report(const DenseMatrix& a, const IndexList& i1, const IndexList& i2,
                                     const PowerIterationSettings& settings) {
  require_two_set(a, i1, i2);
  const DenseMatrix c = schur_map(a, i1, i2);
  const NormEstimate n = two_norm(c, settings);
  const NormEstimate rho = spectral_radius(c, settings);
  return {n.value, n.value * n.value, rho.value, n.converged && rho.converged};
}

double contraction_factor(const DenseMatrix& a, const IndexList& i1, const IndexList& i2,
                          const PowerIterationSettings& settings) {
  require_two_set(a, i1, i2);
  return two_norm(schur_map(a, i1, i2), settings).value;
}

double spectral_radius_condition(const DenseMatrix& a, const IndexList& i1, const IndexList& i2,
                                 const PowerIterationSettings& settings) {
  require_two_set(a, i1, i2);
  const DenseMatrix a1inv = spd_inverse(gather(a, i1, i1));
  const DenseMatrix a2inv = spd_inverse(gather(a, i2, i2));
  const DenseMatrix left = matmul(matmul(gather(a, i1, i2), a2inv), gather(a, i2, i1));
  return spectral_radius(matmul(left, a1inv), settings).value;
}

double lemma_error_recurrence_check(const DenseMatrix& a, const IndexList& i1, const IndexList& i2,
                                    const DenseMatrix& guess, std::size_t r) {
  require_two_set(a, i1, i2);
  if (a.rows() > 512) throw InvalidArgument("lemma check is limited to p <= 512");
  if (guess.rows() != i2.size() || guess.cols() != i2.size())
    throw DimensionMismatch("guess must match the I_2 block");

  const DenseMatrix sigma_2 = gather(spd_inverse(a), i2, i2);
  const DenseMatrix e0 = guess - sigma_2;

  DenseMatrix sigma(a.rows(), a.cols());
  scatter_add_assign(sigma, i2, i2, guess);
  for (std::size_t s = 0; s < r; ++s) {
    block_update(a, sigma, i1, i2);
    block_update(a, sigma, i2, i1);
  }
  const DenseMatrix direct = gather(sigma, i2, i2) - sigma_2;

  const DenseMatrix c = schur_map(a, i1, i2);
  DenseMatrix formula = e0;
  for (std::size_t s = 0; s < r; ++s) formula = matmul(matmul(c, formula), Trans::No, c, Trans::Yes);

  const double scale = std::max({frobenius_norm(direct), frobenius_norm(formula), 1e-6 * frobenius_norm(sigma_2)});
  return frobenius_norm(direct - formula) / scale;
}

CostBreakdown flop_cost(std::size_t p, std::size_t k, double overlap_fraction) {
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 0.5))
    throw InvalidOverlap("overlap fraction must lie in [0, 0.5)");
  if (k < 2) throw TooManyBlocks("need at least two blocks");
  if (p < 2 * k) throw TooManyBlocks("p must be at least 2k");
  CostBreakdown c;
  c.k = k;
  c.m = p / k;
  c.h = static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(c.m)));
  if (c.h >= c.m) throw TooManyBlocks("overlap depth must be smaller than the block size");

  const std::uint64_t m = c.m, h = c.h, kk = k;
  // 3 * [(1/3) n^3 + 2 K^2 m^2 n] = n^3 + 6 K^2 m^2 n
  auto step = [&](std::uint64_t n) {
    return checked_add(cube(n), checked_mul(checked_mul(6 * kk * kk, checked_mul(m, m)), n));
  };
  for (std::size_t j = 0; j < k; ++j) {
    const bool edge = j == 0 || j + 1 == k;
    c.per_step_thirds.push_back(step(edge ? m + h : m + 2 * h));
    c.total_thirds = checked_add(c.total_thirds, c.per_step_thirds.back());
  }
  c.direct_thirds = checked_mul(7, cube(checked_mul(kk, m)));
  return c;
}

NewtonSchultzResult newton_schultz(const DenseMatrix& a, const DenseMatrix& x0, double tol,
                                   std::size_t max_iters, const PowerIterationSettings& settings) {
  if (!a.is_square()) throw DimensionMismatch("newton_schultz: matrix is not square");
  if (x0.rows() != a.rows() || x0.cols() != a.cols())
    throw DimensionMismatch("newton_schultz: x0 must have the shape of a");
  const std::size_t n = a.rows();
  NewtonSchultzResult out{x0, 0, false, 0.0};
  for (;;) {
    // r = I - A X
    DenseMatrix res = DenseMatrix::identity(n);
    gemm(-1.0, a.view(), Trans::No, out.x.view(), Trans::No, 1.0, res.view());
    out.residual = two_norm(res, settings).value;
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    if (!std::isfinite(out.residual) || out.residual > 1e12 || out.iterations >= max_iters) return out;
    // X (2I - AX) = X + X r
    DenseMatrix next = out.x;
    gemm(1.0, out.x.view(), Trans::No, res.view(), Trans::No, 1.0, next.view());
    out.x = std::move(next);
    ++out.iterations;
  }
}

}  // namespace ibmi
