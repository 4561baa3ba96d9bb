#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ibmi/ibmi.hpp"

using nlohmann::json;

namespace {

struct KernelOpts {
  std::string family = "rbf";
  double sigma = 0.5;
  double tau = 3.0;
  std::size_t dim = 1;
  std::size_t p = 0;

  void add(CLI::App* app, bool required_p) {
    app->add_option("--kernel", family, "exp | rbf | iquad | matern32 | matern52")->capture_default_str();
    app->add_option("--sigma", sigma, "RBF length scale")->capture_default_str();
    app->add_option("--tau", tau, "Matern length scale")->capture_default_str();
    app->add_option("--dim", dim, "grid dimension (1 or 2)")->check(CLI::IsMember({1, 2}))->capture_default_str();
    auto* opt = app->add_option("-p,--size", p, "matrix dimension");
    if (required_p) opt->required();
  }

  ibmi::DenseMatrix make() const {
    ibmi::KernelSpec spec{ibmi::parse_kernel_family(family), sigma, tau};
    return ibmi::kernel_matrix(spec, ibmi::make_grid(dim, p));
  }
};

struct PartitionOpts {
  std::size_t blocks = 2;
  double overlap = 0.0;
  std::string ordering = "contiguous";
  std::string file;

  void add(CLI::App* app) {
    app->add_option("--blocks", blocks, "number of index sets K")->capture_default_str();
    app->add_option("--overlap", overlap, "overlap fraction of the base block size")->capture_default_str();
    app->add_option("--ordering", ordering, "contiguous | red-black")
        ->check(CLI::IsMember({"contiguous", "red-black"}))
        ->capture_default_str();
    app->add_option("--partition", file, "JSON partition file {\"p\": n, \"sets\": [[...], ...]}");
  }

  ibmi::Partition make(std::size_t p) const {
    if (!file.empty()) return ibmi::load_partition(file);
    if (ordering == "red-black") return ibmi::red_black_partition(p);
    return ibmi::contiguous_partition(p, blocks, overlap);
  }
};

struct SolverOpts {
  double tol = 1e-8;
  std::size_t max_iters = 500;
  std::string guess = "identity";

  void add(CLI::App* app) {
    app->add_option("--tol", tol, "stopping tolerance")->capture_default_str();
    app->add_option("--max-iters", max_iters, "sweep cap")->capture_default_str();
    app->add_option("--guess", guess, "identity | local | mc:N:SEED | takahashi")->capture_default_str();
  }

  ibmi::IbmiConfig make() const {
    ibmi::IbmiConfig cfg;
    cfg.tol = tol;
    cfg.max_iterations = max_iters;
    cfg.initial_guess = ibmi::InitialGuess::parse(guess);
    return cfg;
  }
};

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ibmi::IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

json cost_json(const ibmi::CostBreakdown& c) {
  json steps = json::array();
  for (std::size_t j = 0; j < c.per_step_thirds.size(); ++j) steps.push_back(c.step_flops(j));
  return {{"k", c.k},
          {"m", c.m},
          {"h", c.h},
          {"per_step_flops", steps},
          {"total_flops", c.total_flops()},
          {"direct_flops", c.direct_flops()}};
}

ibmi::DenseMatrix input_matrix(const std::string& path, const KernelOpts& kernel) {
  if (!path.empty()) return ibmi::io::load_matrix(path);
  if (kernel.p == 0) throw ibmi::InvalidArgument("give --in or a kernel with --size");
  return kernel.make();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative block inversion of SPD matrices"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a kernel matrix");
  KernelOpts gen_kernel;
  std::string gen_out;
  gen_kernel.add(gen, true);
  gen->add_option("-o,--out", gen_out, "output file (.csv for text, IBMI1 otherwise)")->required();

  auto* inv = app.add_subcommand("invert", "approximate the inverse of an SPD matrix");
  std::string inv_in, inv_out, inv_report;
  PartitionOpts inv_part;
  SolverOpts inv_solver;
  inv->add_option("-i,--in", inv_in, "input matrix")->required();
  inv->add_option("-o,--out", inv_out, "output matrix");
  inv->add_option("--report", inv_report, "report JSON path ('-' for stdout)");
  inv_part.add(inv);
  inv_solver.add(inv);

  auto* ana = app.add_subcommand("analyze", "contraction factor, spectral radius and cost model");
  std::string ana_in, ana_out = "-";
  KernelOpts ana_kernel;
  PartitionOpts ana_part;
  ana->add_option("-i,--in", ana_in, "input matrix (otherwise generated from the kernel flags)");
  ana_kernel.add(ana, false);
  ana_part.add(ana);
  ana->add_option("-o,--out", ana_out, "JSON output ('-' for stdout)")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "run an experiment spec");
  std::string bench_spec, bench_out;
  bench->add_option("--spec", bench_spec, "experiment spec JSON")->required();
  bench->add_option("-o,--out", bench_out, "results CSV")->required();

  auto* cmp = app.add_subcommand("compare", "IBMI against spd_inverse and Newton-Schultz");
  std::string cmp_in, cmp_out = "-";
  KernelOpts cmp_kernel;
  PartitionOpts cmp_part;
  SolverOpts cmp_solver;
  std::size_t ns_iters = 100;
  bool ns_skip = false;
  cmp->add_option("-i,--in", cmp_in, "input matrix (otherwise generated from the kernel flags)");
  cmp_kernel.add(cmp, false);
  cmp_part.add(cmp);
  cmp_solver.add(cmp);
  cmp->add_option("--ns-max-iters", ns_iters, "Newton-Schultz iteration cap")->capture_default_str();
  cmp->add_flag("--no-newton", ns_skip, "skip the Newton-Schultz baseline");
  cmp->add_option("-o,--out", cmp_out, "JSON output ('-' for stdout)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      ibmi::io::save_matrix(gen_out, gen_kernel.make());
      return 0;
    }

    if (*inv) {
      const ibmi::DenseMatrix a = ibmi::io::load_matrix(inv_in);
      const ibmi::SolveReport rep = ibmi::solve(a, inv_part.make(a.rows()), inv_solver.make());
      if (!inv_out.empty()) ibmi::io::save_matrix(inv_out, rep.result);
      if (!inv_report.empty()) {
        write_json({{"iterations", rep.iterations},
                    {"converged", rep.converged},
                    {"error_trace", rep.error_trace},
                    {"wall_times", rep.wall_times},
                    {"total_seconds", rep.total_seconds}},
                   inv_report);
      }
      if (!rep.converged)
        std::cerr << "not converged after " << rep.iterations << " sweeps (error "
                  << rep.error_trace.back() << ")\n";
      return 0;
    }

    if (*ana) {
      const ibmi::DenseMatrix a = input_matrix(ana_in, ana_kernel);
      ibmi::Partition two = ana_part.ordering == "red-black" ? ibmi::red_black_partition(a.rows())
                                                             : ibmi::contiguous_partition(a.rows(), 2, 0.0);
      const ibmi::ContractionReport c = ibmi::contraction_report(a, two.sets[0], two.sets[1]);
      write_json({{"contraction_factor", c.factor},
                  {"bound_rate", c.bound_rate},
                  {"spectral_radius", c.spectral_radius},
                  {"cost_model", cost_json(ibmi::flop_cost(a.rows(), ana_part.blocks, ana_part.overlap))}},
                 ana_out);
      return 0;
    }

    if (*bench) {
      const auto rows = ibmi::run_experiment(ibmi::load_experiment_spec(bench_spec));
      ibmi::emit_csv(rows, bench_out);
      std::size_t failed = 0;
      for (const auto& r : rows)
        if (!r.ok()) {
          ++failed;
          std::cerr << "p=" << r.p << " K=" << r.k << " overlap=" << r.overlap << ": " << r.status << '\n';
        }
      return failed == 0 ? 0 : 2;
    }

    if (*cmp) {
      const ibmi::DenseMatrix a = input_matrix(cmp_in, cmp_kernel);
      const ibmi::IbmiConfig cfg = cmp_solver.make();
      const ibmi::ExperimentRow row = ibmi::compare_direct(a, cmp_part.make(a.rows()), cfg);
      json out = {{"p", row.p},
                  {"ibmi", {{"iterations", row.iterations},
                            {"converged", row.converged},
                            {"seconds", row.solve_seconds},
                            {"error_vs_direct", *row.final_error_vs_direct}}},
                  {"direct", {{"seconds", *row.direct_seconds}}}};
      if (!ns_skip) {
        const auto t0 = std::chrono::steady_clock::now();
        const double scale = 1.0 / ibmi::two_norm(a).value;
        const auto ns = ibmi::newton_schultz(a, scale * ibmi::DenseMatrix::identity(a.rows()), cfg.tol, ns_iters);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out["newton_schultz"] = {{"iterations", ns.iterations},
                                 {"converged", ns.converged},
                                 {"residual", ns.residual},
                                 {"seconds", secs}};
      }
      write_json(out, cmp_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
