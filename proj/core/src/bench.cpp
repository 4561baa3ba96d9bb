#include "ibmi/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ibmi/factor.hpp"
#include "ibmi/norms.hpp"

namespace ibmi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Partition make_partition(const ExperimentSpec& spec, std::size_t p, std::size_t k, double f) {
  if (spec.ordering == Ordering::RED_BLACK) return red_black_partition(p);
  return contiguous_partition(p, k, f);
}

}  // namespace

void ExperimentSpec::check() const {
  if (sizes.empty()) throw InvalidArgument("experiment '" + name + "' has no sizes");
  if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
  if (partition_grid.empty()) throw InvalidArgument("experiment '" + name + "' has no partitions");
  if (data_dim != 1 && data_dim != 2) throw InvalidArgument("data_dim must be 1 or 2");
  if (ordering == Ordering::CUSTOM) throw InvalidArgument("experiments use contiguous or red-black ordering");
  check_hyperparameters(kernel);
  IbmiConfig cfg{tol, max_iterations, guess, {}};
  cfg.check();
}

ExperimentSpec experiment_spec_from_json(std::string_view text) {
  ExperimentSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    spec.name = j.value("name", spec.name);
    if (j.contains("kernel")) {
      const auto& k = j.at("kernel");
      if (k.is_string()) {
        spec.kernel.family = parse_kernel_family(k.get<std::string>());
      } else {
        spec.kernel.family = parse_kernel_family(k.at("family").get<std::string>());
        spec.kernel.sigma = k.value("sigma", spec.kernel.sigma);
        spec.kernel.tau = k.value("tau", spec.kernel.tau);
      }
    }
    spec.data_dim = j.value("data_dim", spec.data_dim);
    spec.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("partitions")) {
      spec.partition_grid.clear();
      for (const auto& e : j.at("partitions"))
        spec.partition_grid.emplace_back(e.at("blocks").get<std::size_t>(), e.value("overlap", 0.0));
    }
    const std::string ordering = j.value("ordering", std::string("contiguous"));
    if (ordering == "contiguous") spec.ordering = Ordering::CONTIGUOUS;
    else if (ordering == "red-black") spec.ordering = Ordering::RED_BLACK;
    else throw InvalidArgument("unknown ordering '" + ordering + "'");
    spec.guess = InitialGuess::parse(j.value("guess", std::string("identity")));
    spec.tol = j.value("tol", spec.tol);
    spec.max_iterations = j.value("max_iterations", spec.max_iterations);
    spec.repeats = j.value("repeats", spec.repeats);
    spec.direct_max_p = j.value("direct_max_p", spec.direct_max_p);
    spec.condition = j.value("condition", spec.condition);
    if (j.contains("memory_budget_gib"))
      spec.memory_budget_bytes = j.at("memory_budget_gib").get<double>() * 1024 * 1024 * 1024;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("experiment spec: ") + e.what());
  }
  spec.check();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return experiment_spec_from_json(buf.str());
}

double estimated_bytes(std::size_t p, bool with_direct) {
  // A, the iterate, cached inverses and couplings, and gemm temporaries.
  const double n2 = static_cast<double>(p) * static_cast<double>(p) * sizeof(double);
  return n2 * (with_direct ? 6.0 : 4.0);
}

ExperimentRow compare_direct(const DenseMatrix& a, const Partition& part, const IbmiConfig& cfg) {
  ExperimentRow row;
  row.p = a.rows();
  row.k = part.k();
  row.overlap = part.overlap_fraction;
  row.ordering = std::string(to_string(part.ordering));
  row.guess = cfg.initial_guess.to_string();

  const SolveReport rep = solve(a, part, cfg);
  row.iterations = rep.iterations;
  row.converged = rep.converged;
  row.solve_seconds = rep.total_seconds;

  const auto t0 = Clock::now();
  const DenseMatrix direct = spd_inverse(a);
  row.direct_seconds = seconds_since(t0);
  row.final_error_vs_direct = two_norm(rep.result - direct, cfg.norm_settings).value;
  return row;
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  spec.check();
  std::vector<ExperimentRow> rows;
  const std::string kernel = describe(spec.kernel);
  for (std::size_t p : spec.sizes) {
    ExperimentRow base;
    base.name = spec.name;
    base.p = p;
    base.kernel = kernel;
    base.data_dim = spec.data_dim;
    base.ordering = std::string(to_string(spec.ordering));
    base.guess = spec.guess.to_string();

    std::optional<DenseMatrix> a;
    std::optional<double> cond;
    std::string size_error;
    try {
      if (estimated_bytes(p, false) > spec.memory_budget_bytes)
        throw OutOfMemoryBudget("p = " + std::to_string(p) + " exceeds the memory budget");
      a = kernel_matrix(spec.kernel, make_grid(spec.data_dim, p));
      if (spec.condition) cond = condition_number_2(*a).value;
    } catch (const Error& e) {
      size_error = e.what();
    }

    for (const auto& [k, f] : spec.partition_grid) {
      ExperimentRow row = base;
      row.k = spec.ordering == Ordering::RED_BLACK ? 2 : k;
      row.overlap = spec.ordering == Ordering::RED_BLACK ? 0.0 : f;
      row.cond_estimate = cond;
      if (!a) {
        row.status = "skipped: " + size_error;
        rows.push_back(row);
        continue;
      }
      try {
        const Partition part = make_partition(spec, p, k, f);
        const IbmiConfig cfg{spec.tol, spec.max_iterations, spec.guess, {}};
        const bool direct = p <= spec.direct_max_p && estimated_bytes(p, true) <= spec.memory_budget_bytes;
        double best = 0.0;
        for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
          SolveReport r = solve(*a, part, cfg);
          if (rep == 0 || r.total_seconds < best) best = r.total_seconds;
          if (rep + 1 < spec.repeats) continue;
          row.iterations = r.iterations;
          row.converged = r.converged;
          if (direct) {
            double best_direct = 0.0;
            DenseMatrix inv(1, 1);
            for (std::size_t d = 0; d < spec.repeats; ++d) {
              const auto t0 = Clock::now();
              inv = spd_inverse(*a);
              const double t = seconds_since(t0);
              if (d == 0 || t < best_direct) best_direct = t;
            }
            row.direct_seconds = best_direct;
            row.final_error_vs_direct = two_norm(r.result - inv).value;
          }
        }
        row.solve_seconds = best;
      } catch (const Error& e) {
        row.status = std::string("failed: ") + e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_rows_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  if (rows.empty()) throw InvalidArgument("no rows to write");
  out << "name,p,kernel,data_dim,ordering,K,overlap,guess,iterations,converged,"
         "final_error_vs_direct,solve_seconds,direct_seconds,cond_estimate,status\n";
  for (const ExperimentRow& r : rows) {
    out << csv_field(r.name) << ',' << r.p << ',' << csv_field(r.kernel) << ',' << r.data_dim << ','
        << r.ordering << ',' << r.k << ',' << fmt(r.overlap) << ',' << r.guess << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',' << fmt(r.final_error_vs_direct) << ','
        << fmt(r.solve_seconds) << ',' << fmt(r.direct_seconds) << ',' << fmt(r.cond_estimate) << ','
        << csv_field(r.status) << '\n';
  }
  if (!out) throw IoError("CSV write failed");
}

void emit_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw InvalidArgument("no rows to write");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_rows_csv(out, rows);
}

}  // namespace ibmi
