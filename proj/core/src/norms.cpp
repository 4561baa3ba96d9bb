#include "ibmi/norms.hpp"

#include "ibmi/gemm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#ifdef IBMI_HAVE_CBLAS
#include <cblas.h>
#endif

namespace ibmi {

namespace {

using Vec = std::vector<double>;

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void scale(Vec& v, double f) {
  for (double& x : v) x *= f;
}

// y = a x
void mul(ConstMatrixView a, const Vec& x, Vec& y) {
  y.assign(a.rows, 0.0);
#ifdef IBMI_HAVE_CBLAS
  if (gemm_backend() == GemmBackend::Blas) {
    cblas_dgemv(CblasRowMajor, CblasNoTrans, static_cast<int>(a.rows), static_cast<int>(a.cols), 1.0,
                a.data, static_cast<int>(a.ld), x.data(), 1, 0.0, y.data(), 1);
    return;
  }
#endif
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.data + i * a.ld;
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) s += ai[j] * x[j];
    y[i] = s;
  }
}

// y = a^T x
void mul_t(ConstMatrixView a, const Vec& x, Vec& y) {
  y.assign(a.cols, 0.0);
#ifdef IBMI_HAVE_CBLAS
  if (gemm_backend() == GemmBackend::Blas) {
    cblas_dgemv(CblasRowMajor, CblasTrans, static_cast<int>(a.rows), static_cast<int>(a.cols), 1.0,
                a.data, static_cast<int>(a.ld), x.data(), 1, 0.0, y.data(), 1);
    return;
  }
#endif
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.data + i * a.ld;
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < a.cols; ++j) y[j] += xi * ai[j];
  }
}

Vec ones_unit(std::size_t n) { return Vec(n, 1.0 / std::sqrt(static_cast<double>(n))); }

Vec random_unit(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (double& x : v) x = dist(gen);
  scale(v, 1.0 / norm2(v));
  return v;
}

// Generic power iteration: `step` maps a unit vector v to w = Op v and returns
// the Rayleigh estimate for the dominant value of Op.
template <class Step>
NormEstimate run_power(Vec v, const PowerIterationSettings& s, Step&& step) {
  NormEstimate est;
  Vec w;
  double prev = 0.0;
  for (std::size_t it = 1; it <= s.max_iterations; ++it) {
    const double lambda = step(v, w);
    est.iterations = it;
    est.value = lambda;
    const double nw = norm2(w);
    if (nw == 0.0 || !std::isfinite(nw)) {
      est.converged = (nw == 0.0);
      return est;
    }
    if (it > 1 && std::abs(lambda - prev) <= s.rel_tol * std::abs(lambda)) {
      est.converged = true;
      return est;
    }
    prev = lambda;
    v.swap(w);
    scale(v, 1.0 / nw);
  }
  return est;
}

// Runs from the all-ones vector and again from a seeded random vector; the
// larger estimate wins. A single all-ones run is not enough: for matrices that
// commute with the index reversal (kernel matrices on uniform grids) the
// dominant vector can be odd and thus exactly orthogonal to all-ones, and the
// iteration then settles on the wrong eigenvalue without stagnating.
template <class Step>
NormEstimate power_with_restart(std::size_t n, const PowerIterationSettings& s, Step&& step) {
  NormEstimate est = run_power(ones_unit(n), s, step);
  if (n > 1) {
    NormEstimate alt = run_power(random_unit(n, s.restart_seed), s, step);
    alt.iterations += est.iterations;
    if (alt.value > est.value) return alt;
    est.iterations = alt.iterations;
  }
  return est;
}

}  // namespace

NormEstimate two_norm(ConstMatrixView a, const PowerIterationSettings& settings) {
  if (a.rows == 0 || a.cols == 0) throw DimensionMismatch("two_norm of an empty matrix");
  Vec av;
  // Power iteration on a^T a; the Rayleigh quotient is |a v|^2 for unit v.
  NormEstimate est = power_with_restart(a.cols, settings, [&](const Vec& v, Vec& w) {
    mul(a, v, av);
    mul_t(a, av, w);
    const double r = norm2(av);
    return r * r;
  });
  est.value = std::sqrt(std::max(est.value, 0.0));
  return est;
}

NormEstimate spectral_radius(const DenseMatrix& a, const PowerIterationSettings& settings) {
  if (!a.is_square()) throw DimensionMismatch("spectral_radius needs a square matrix");
  // For a possibly non-normal matrix the ratio |A v| / |v| of the normalized
  // iterate converges to |lambda_max| when the dominant eigenvalue is simple.
  return power_with_restart(a.rows(), settings, [&](const Vec& v, Vec& w) {
    mul(a.view(), v, w);
    return norm2(w);
  });
}

ConditionEstimate condition_number_2(const DenseMatrix& a, const PowerIterationSettings& settings) {
  if (!a.is_square()) throw DimensionMismatch("condition_number_2 needs a square matrix");
  const CholeskyFactor f = cholesky(a);
  const std::size_t n = a.rows();

  const NormEstimate top = power_with_restart(n, settings, [&](const Vec& v, Vec& w) {
    mul(a.view(), v, w);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * w[i];
    return s;
  });

  DenseMatrix rhs(n, 1);
  const NormEstimate bottom = power_with_restart(n, settings, [&](const Vec& v, Vec& w) {
    std::copy(v.begin(), v.end(), rhs.data());
    solve_lower(f.l, rhs.view());
    solve_lower_transposed(f.l, rhs.view());
    w.assign(rhs.data(), rhs.data() + n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * w[i];
    return s;
  });

  ConditionEstimate c;
  c.lambda_max = top.value;
  c.lambda_min = 1.0 / bottom.value;
  c.value = c.lambda_max / c.lambda_min;
  c.converged = top.converged && bottom.converged;
  return c;
}

}  // namespace ibmi
