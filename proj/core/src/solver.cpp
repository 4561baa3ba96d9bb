#include "ibmi/solver.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <random>

#include "ibmi/factor.hpp"
#include "ibmi/gemm.hpp"

namespace ibmi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t parse_count(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

// Per-set quantities that do not change between sweeps.
struct PreparedSet {
  IndexList set;
  IndexList comp;
  DenseMatrix ainv;     // A_I^{-1}
  DenseMatrix w;        // A_I^{-1} A_{I,Ic}
  DenseMatrix schur;    // A_{Ic} - A_{Ic,I} W, kept only for the last set
};

PreparedSet prepare(const DenseMatrix& a, IndexList set, IndexList comp, bool keep_blocks) {
  PreparedSet ps;
  ps.ainv = spd_inverse(gather(a, set, set));
  if (!comp.empty()) {
    DenseMatrix cross = gather(a, set, comp);
    ps.w = matmul(ps.ainv, cross);
    if (keep_blocks) {
      ps.schur = gather(a, comp, comp);
      gemm(-1.0, cross.view(), Trans::Yes, ps.w.view(), Trans::No, 1.0, ps.schur.view());
      ps.schur.symmetrize();
    }
  }
  ps.set = std::move(set);
  ps.comp = std::move(comp);
  return ps;
}

// Copies the strict lower triangle onto the upper one, in tiles.
void mirror_lower(DenseMatrix& s) {
  constexpr std::size_t kTile = 64;
  const std::size_t n = s.rows();
  for (std::size_t i0 = 0; i0 < n; i0 += kTile)
    for (std::size_t j0 = i0; j0 < n; j0 += kTile) {
      const std::size_t i1 = std::min(i0 + kTile, n), j1 = std::min(j0 + kTile, n);
      for (std::size_t i = i0; i < i1; ++i)
        for (std::size_t j = std::max(j0, i + 1); j < j1; ++j) s(i, j) = s(j, i);
    }
}

// Returns M = W S_{Ic} (empty when the complement is empty).
DenseMatrix apply(DenseMatrix& sigma, const PreparedSet& ps) {
  if (ps.comp.empty()) {
    scatter_add_assign(sigma, ps.set, ps.set, ps.ainv);
    return {};
  }
  // Everything read from sigma is copied out before the first write.
  const DenseMatrix s_comp = gather(sigma, ps.comp, ps.comp);
  DenseMatrix m = matmul(ps.w, s_comp);
  // M W^T = W S W^T is symmetric: form the lower triangle by block rows, then mirror.
  DenseMatrix top = ps.ainv;
  const std::size_t n = top.rows(), c = ps.comp.size();
  constexpr std::size_t kRows = 256;
  for (std::size_t i0 = 0; i0 < n; i0 += kRows) {
    const std::size_t ib = std::min(kRows, n - i0);
    gemm(1.0, m.view().block(i0, 0, ib, c), Trans::No, ps.w.view().block(0, 0, i0 + ib, c), Trans::Yes, 1.0,
         top.view().block(i0, 0, ib, i0 + ib));
  }
  mirror_lower(top);
  scatter_add_assign(sigma, ps.set, ps.set, top);
  DenseMatrix neg = m;
  for (std::size_t i = 0; i < neg.size(); ++i) neg.data()[i] = -neg.data()[i];
  scatter_add_assign(sigma, ps.set, ps.comp, neg);
  scatter_add_assign(sigma, ps.comp, ps.set, neg.transposed());
  return m;
}

NormEstimate estimate_from_blocks(const DenseMatrix& sigma, const IndexList& set, const IndexList& comp,
                                  const DenseMatrix& a_cross, const DenseMatrix& a_comp,
                                  const PowerIterationSettings& settings) {
  DenseMatrix e = matmul(gather(sigma, set, set), a_cross);
  gemm(1.0, gather(sigma, set, comp).view(), Trans::No, a_comp.view(), Trans::No, 1.0, e.view());
  return two_norm(e, settings);
}

// Right after the update of `ps`, S_I A_{I,Ic} + S_{I,Ic} A_{Ic} simplifies to
// W - M (A_{Ic} - A_{Ic,I} W), one product instead of two.
NormEstimate estimate_after_update(const PreparedSet& ps, const DenseMatrix& m,
                                   const PowerIterationSettings& settings) {
  DenseMatrix e = ps.w;
  gemm(-1.0, m.view(), Trans::No, ps.schur.view(), Trans::No, 1.0, e.view());
  return two_norm(e, settings);
}

}  // namespace

InitialGuess InitialGuess::parse(std::string_view text) {
  if (text == "identity") return identity();
  if (text == "local") return local_inverse();
  if (text == "takahashi") return takahashi();
  if (text == "mc") return monte_carlo(100, 0);
  if (text.substr(0, 3) == "mc:") {
    std::string_view rest = text.substr(3);
    const auto colon = rest.find(':');
    const std::size_t n = parse_count(rest.substr(0, colon), "sample count");
    const std::uint64_t seed = colon == std::string_view::npos ? 0 : parse_count(rest.substr(colon + 1), "seed");
    if (n == 0) throw InvalidArgument("Monte Carlo guess needs at least one sample");
    return monte_carlo(n, seed);
  }
  throw InvalidArgument("unknown initial guess '" + std::string(text) + "'");
}

std::string InitialGuess::to_string() const {
  switch (kind) {
    case Kind::IDENTITY: return "identity";
    case Kind::LOCAL_INVERSE: return "local";
    case Kind::MONTE_CARLO: return "mc:" + std::to_string(n_samples) + ":" + std::to_string(seed);
    case Kind::TAKAHASHI: return "takahashi";
  }
  return "?";
}

void IbmiConfig::check() const {
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  if (initial_guess.kind == InitialGuess::Kind::MONTE_CARLO && initial_guess.n_samples < 1)
    throw InvalidArgument("Monte Carlo guess needs at least one sample");
}

void block_update(const DenseMatrix& a, DenseMatrix& sigma, const IndexList& set, const IndexList& comp) {
  if (!a.is_square() || sigma.rows() != a.rows() || sigma.cols() != a.cols())
    throw DimensionMismatch("block_update: a and sigma must be square and the same size");
  if (set.size() + comp.size() < a.rows())
    throw DimensionMismatch("block_update: set and complement do not cover the matrix");
  apply(sigma, prepare(a, set, comp, false));
}

NormEstimate error_estimate(const DenseMatrix& a, const DenseMatrix& sigma, const IndexList& set,
                            const IndexList& comp, const PowerIterationSettings& settings) {
  if (!a.is_square() || sigma.rows() != a.rows() || sigma.cols() != a.cols())
    throw DimensionMismatch("error_estimate: a and sigma must be square and the same size");
  if (comp.empty()) return {0.0, true, 0};
  return estimate_from_blocks(sigma, set, comp, gather(a, set, comp), gather(a, comp, comp), settings);
}

SolveReport solve(const DenseMatrix& a, const Partition& part, const IbmiConfig& cfg) {
  cfg.check();
  if (!a.is_square()) throw DimensionMismatch("solve: matrix is not square");
  if (a.rows() != part.p) throw DimensionMismatch("solve: partition size differs from matrix size");
  validate(part);

  const auto t_start = Clock::now();
  const std::size_t k = part.k();
  std::vector<PreparedSet> prepared;
  prepared.reserve(k);
  for (std::size_t j = 0; j < k; ++j)
    prepared.push_back(prepare(a, part.sets[j], complement(part, j), j + 1 == k));

  DenseMatrix sigma(a.rows(), a.cols());
  const IndexList& comp1 = prepared.front().comp;
  if (!comp1.empty()) scatter_add_assign(sigma, comp1, comp1, make_initial_guess(a, comp1, cfg.initial_guess));

  SolveReport report;
  const PreparedSet& last = prepared.back();
  for (std::size_t r = 1; r <= cfg.max_iterations; ++r) {
    const auto t_sweep = Clock::now();
    DenseMatrix m;
    for (const PreparedSet& ps : prepared) m = apply(sigma, ps);
    NormEstimate err{0.0, true, 0};
    if (!last.comp.empty()) err = estimate_after_update(last, m, cfg.norm_settings);
    report.wall_times.push_back(seconds_since(t_sweep));
    report.error_trace.push_back(err.value);
    report.norm_estimates_converged = report.norm_estimates_converged && err.converged;
    report.iterations = r;
    if (err.value <= cfg.tol) {
      report.converged = true;
      break;
    }
  }
  report.total_seconds = seconds_since(t_start);
  report.result = std::move(sigma);
  return report;
}

DenseMatrix initial_guess_identity(std::size_t comp_size) {
  if (comp_size == 0) throw InvalidArgument("initial guess of size zero");
  return DenseMatrix::identity(comp_size);
}

DenseMatrix initial_guess_local_inverse(const DenseMatrix& a, const IndexList& comp) {
  return spd_inverse(gather(a, comp, comp));
}

DenseMatrix initial_guess_monte_carlo(const DenseMatrix& a, const IndexList& comp, std::size_t n_samples,
                                      std::uint64_t seed) {
  if (n_samples == 0) throw InvalidArgument("Monte Carlo guess needs at least one sample");
  const CholeskyFactor f = cholesky(a);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  // Columns of z are samples: L^T z = w gives cov(z) = A^{-1}.
  DenseMatrix z(a.rows(), n_samples);
  for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] = normal(gen);
  solve_lower_transposed(f.l, z.view());
  const DenseMatrix zc = gather(z, comp, [&] {
    IndexList all(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) all[i] = i;
    return all;
  }());
  DenseMatrix est(comp.size(), comp.size());
  gemm(1.0 / static_cast<double>(n_samples), zc.view(), Trans::No, zc.view(), Trans::Yes, 0.0, est.view());
  est.symmetrize();
  return est;
}

DenseMatrix initial_guess_takahashi(const DenseMatrix& a, const IndexList& comp) {
  const std::size_t p = a.rows();
  const std::size_t c = comp.size();
  if (c == 0) throw InvalidArgument("Takahashi guess of size zero");
  // Order the matrix as [rest, comp] so the wanted block sits in the lower-right corner.
  std::vector<char> in_comp(p, 0);
  for (std::size_t i : comp) {
    if (i >= p) throw IndexOutOfRange("Takahashi: index " + std::to_string(i));
    in_comp[i] = 1;
  }
  IndexList order;
  order.reserve(p);
  for (std::size_t i = 0; i < p; ++i)
    if (!in_comp[i]) order.push_back(i);
  order.insert(order.end(), comp.begin(), comp.end());
  const LdlFactor f = ldlt(gather(a, order, order));

  // h_ij = delta_ij / d_i - sum_{k>i} l_ki h_kj, over the corner rows only.
  const std::size_t off = p - c;
  DenseMatrix h(c, c);
  std::vector<double> acc(c);
  for (std::size_t i = c; i-- > 0;) {
    // Off-diagonal entries first; the diagonal then needs h_ki = h_ik.
    std::fill(acc.begin() + i, acc.end(), 0.0);
    for (std::size_t k = i + 1; k < c; ++k) {
      const double lki = f.l(off + k, off + i);
      if (lki == 0.0) continue;
      const double* hk = &h(k, 0);
      for (std::size_t j = i + 1; j < c; ++j) acc[j] += lki * hk[j];
    }
    double diag = 1.0 / f.d[off + i];
    for (std::size_t j = i + 1; j < c; ++j) {
      h(i, j) = -acc[j];
      h(j, i) = h(i, j);
      diag -= f.l(off + j, off + i) * h(j, i);
    }
    h(i, i) = diag;
  }
  h.symmetrize();
  return h;
}

DenseMatrix make_initial_guess(const DenseMatrix& a, const IndexList& comp, const InitialGuess& guess) {
  switch (guess.kind) {
    case InitialGuess::Kind::IDENTITY: return initial_guess_identity(comp.size());
    case InitialGuess::Kind::LOCAL_INVERSE: return initial_guess_local_inverse(a, comp);
    case InitialGuess::Kind::MONTE_CARLO:
      return initial_guess_monte_carlo(a, comp, guess.n_samples, guess.seed);
    case InitialGuess::Kind::TAKAHASHI: return initial_guess_takahashi(a, comp);
  }
  return initial_guess_identity(comp.size());
}

}  // namespace ibmi
