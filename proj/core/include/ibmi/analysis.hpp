#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ibmi/matrix.hpp"
#include "ibmi/norms.hpp"

namespace ibmi {

// For a two-set non-overlapping split with C = A_2^{-1} A_21 A_1^{-1} A_12:
// the I_2 error after r sweeps is C^r E_0 (C^T)^r, so ||C||_2^2 bounds the
// per-sweep reduction.
struct ContractionReport {
  double factor = 0.0;           // ||C||_2
  double bound_rate = 0.0;       // factor^2
  double spectral_radius = 0.0;  // rho(C), the asymptotic per-sweep rate is its square
  bool converged = true;         // all power iterations converged
};

double contraction_factor(const DenseMatrix& a, const IndexList& i1, const IndexList& i2,
                          const PowerIterationSettings& settings = {});
ContractionReport contraction_report(const DenseMatrix& a, const IndexList& i1, const IndexList& i2,
                                     const PowerIterationSettings& settings = {});

// rho(A_12 A_2^{-1} A_21 A_1^{-1}), which is < 1 for SPD input.
double spectral_radius_condition(const DenseMatrix& a, const IndexList& i1, const IndexList& i2,
                                 const PowerIterationSettings& settings = {});

// Runs r two-block sweeps from `guess` (the initial I_2 block) and compares the
// simulated I_2 error with C^r E_0 (C^T)^r. Returns ||direct - formula||_F over
// max(||direct||_F, ||formula||_F, 1e-6 ||Sigma_2||_F). Requires p <= 512.
double lemma_error_recurrence_check(const DenseMatrix& a, const IndexList& i1, const IndexList& i2,
                                    const DenseMatrix& guess, std::size_t r);

// Cost model for one sweep, in units of 1/3 flop so that every term is an
// integer. Edge sets cost (1/3)(m+h)^3 + 2K^2 m^2 (m+h), interior sets
// (1/3)(m+2h)^3 + 2K^2 m^2 (m+2h); the direct baseline is (7/3)(Km)^3.
struct CostBreakdown {
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t h = 0;
  std::vector<std::uint64_t> per_step_thirds;
  std::uint64_t total_thirds = 0;
  std::uint64_t direct_thirds = 0;

  double total_flops() const { return static_cast<double>(total_thirds) / 3.0; }
  double direct_flops() const { return static_cast<double>(direct_thirds) / 3.0; }
  double step_flops(std::size_t j) const { return static_cast<double>(per_step_thirds.at(j)) / 3.0; }
};

CostBreakdown flop_cost(std::size_t p, std::size_t k, double overlap_fraction);

struct NewtonSchultzResult {
  DenseMatrix x;
  std::size_t iterations = 0;  // updates X <- X(2I - AX) applied
  bool converged = false;
  double residual = 0.0;       // last ||I - AX||_2
};

// Stops when ||I - AX||_2 <= tol, after max_iters updates, or once the
// residual is non-finite or above 1e12.
NewtonSchultzResult newton_schultz(const DenseMatrix& a, const DenseMatrix& x0, double tol,
                                   std::size_t max_iters, const PowerIterationSettings& settings = {});

}  // namespace ibmi
