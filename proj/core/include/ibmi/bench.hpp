#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ibmi/kernels.hpp"
#include "ibmi/partition.hpp"
#include "ibmi/solver.hpp"

namespace ibmi {

struct ExperimentSpec {
  std::string name = "experiment";
  KernelSpec kernel;
  std::size_t data_dim = 1;
  std::vector<std::size_t> sizes;
  std::vector<std::pair<std::size_t, double>> partition_grid{{2, 0.0}};  // (K, overlap fraction)
  Ordering ordering = Ordering::CONTIGUOUS;  // RED_BLACK forces K = 2, no overlap
  InitialGuess guess;
  double tol = 1e-8;
  std::size_t max_iterations = 500;
  std::size_t repeats = 1;
  std::size_t direct_max_p = 8192;  // above this, no direct inverse is formed
  bool condition = false;           // also estimate cond_2(A)
  double memory_budget_bytes = 4.0 * 1024 * 1024 * 1024;

  void check() const;  // throws InvalidArgument
};

ExperimentSpec experiment_spec_from_json(std::string_view text);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct ExperimentRow {
  std::string name;
  std::size_t p = 0;
  std::string kernel;
  std::size_t data_dim = 1;
  std::string ordering;
  std::size_t k = 0;
  double overlap = 0.0;
  std::string guess;
  std::size_t iterations = 0;
  bool converged = false;
  std::optional<double> final_error_vs_direct;
  double solve_seconds = 0.0;  // fastest of the repeats
  std::optional<double> direct_seconds;
  std::optional<double> cond_estimate;
  std::string status = "ok";  // anything else means the row failed or was skipped

  bool ok() const { return status == "ok"; }
};

// Rough peak footprint of a solve (and optionally a direct inverse) at size p.
double estimated_bytes(std::size_t p, bool with_direct);

// Errors from individual rows are recorded in ExperimentRow::status.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

// Solve plus spd_inverse on the same matrix; fills both timings and ||S - A^{-1}||_2.
ExperimentRow compare_direct(const DenseMatrix& a, const Partition& part, const IbmiConfig& cfg);

void write_rows_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);
void emit_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path);

}  // namespace ibmi
