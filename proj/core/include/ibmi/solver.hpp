#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ibmi/matrix.hpp"
#include "ibmi/norms.hpp"
#include "ibmi/partition.hpp"

namespace ibmi {

struct InitialGuess {
  enum class Kind { IDENTITY, LOCAL_INVERSE, MONTE_CARLO, TAKAHASHI };
  Kind kind = Kind::IDENTITY;
  std::size_t n_samples = 100;  // MONTE_CARLO only
  std::uint64_t seed = 0;       // MONTE_CARLO only

  static InitialGuess identity() { return {}; }
  static InitialGuess local_inverse() { return {Kind::LOCAL_INVERSE}; }
  static InitialGuess monte_carlo(std::size_t n, std::uint64_t seed) { return {Kind::MONTE_CARLO, n, seed}; }
  static InitialGuess takahashi() { return {Kind::TAKAHASHI}; }

  // "identity", "local", "mc", "mc:N", "mc:N:SEED" or "takahashi".
  static InitialGuess parse(std::string_view text);
  std::string to_string() const;
};

struct IbmiConfig {
  double tol = 1e-8;
  std::size_t max_iterations = 500;
  InitialGuess initial_guess;
  PowerIterationSettings norm_settings;

  void check() const;  // throws InvalidArgument
};

struct SolveReport {
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> error_trace;
  std::vector<double> wall_times;  // seconds per sweep, error estimate included
  double total_seconds = 0.0;      // setup, initial guess and all sweeps
  bool norm_estimates_converged = true;
  DenseMatrix result;
};

// One update of sigma for the index set `set` with complement `comp`:
//   W = A_I^{-1} A_{I,Ic},  M = W S_{Ic}
//   S_I = A_I^{-1} + M W^T,  S_{I,Ic} = -M,  S_{Ic,I} = -M^T.
void block_update(const DenseMatrix& a, DenseMatrix& sigma, const IndexList& set, const IndexList& comp);

// || S_I A_{I,Ic} + S_{I,Ic} A_{Ic} ||_2, the (I, Ic) block of S A.
NormEstimate error_estimate(const DenseMatrix& a, const DenseMatrix& sigma, const IndexList& set,
                            const IndexList& comp, const PowerIterationSettings& settings = {});

SolveReport solve(const DenseMatrix& a, const Partition& part, const IbmiConfig& cfg = {});

DenseMatrix initial_guess_identity(std::size_t comp_size);
DenseMatrix initial_guess_local_inverse(const DenseMatrix& a, const IndexList& comp);
DenseMatrix initial_guess_monte_carlo(const DenseMatrix& a, const IndexList& comp, std::size_t n_samples,
                                      std::uint64_t seed);
DenseMatrix initial_guess_takahashi(const DenseMatrix& a, const IndexList& comp);

DenseMatrix make_initial_guess(const DenseMatrix& a, const IndexList& comp, const InitialGuess& guess);

}  // namespace ibmi
