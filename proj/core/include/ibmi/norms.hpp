#pragma once

#include <cstddef>
#include <cstdint>

#include "ibmi/factor.hpp"
#include "ibmi/matrix.hpp"

namespace ibmi {

struct PowerIterationSettings {
  // Stop once the Rayleigh estimate changes by at most this much (relative)
  // between consecutive iterations.
  double rel_tol = 1e-9;
  std::size_t max_iterations = 5000;
  // Seed for the second start vector; every estimate runs from all-ones and
  // from this seeded random vector and keeps the larger value.
  std::uint64_t restart_seed = 0x1b3dULL;
};

/// Result of an iterative norm or eigenvalue estimate. `converged == false`
/// means the iteration cap was hit and `value` is the best estimate so far.
struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// sigma_max(a) by power iteration on a^T a.
NormEstimate two_norm(ConstMatrixView a, const PowerIterationSettings& settings = {});
inline NormEstimate two_norm(const DenseMatrix& a, const PowerIterationSettings& settings = {}) {
  return two_norm(a.view(), settings);
}

// Dominant eigenvalue modulus of a general square matrix (power iteration on a itself).
NormEstimate spectral_radius(const DenseMatrix& a, const PowerIterationSettings& settings = {});

struct ConditionEstimate {
  double value = 0.0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  bool converged = false;
};

// Kernel matrices on grids have tightly clustered extreme eigenvalues, where
// the Rayleigh estimate moves by about err/k per step; 1e-7 still leaves the
// estimate within ~1e-4 of the true value and saves thousands of solves.
inline constexpr PowerIterationSettings kConditionSettings{1e-7, 5000, 0x1b3dULL};

// lambda_max / lambda_min for SPD input: power iteration for the top end,
// inverse iteration with Cholesky solves for the bottom end.
ConditionEstimate condition_number_2(const DenseMatrix& a,
                                     const PowerIterationSettings& settings = kConditionSettings);

}  // namespace ibmi
