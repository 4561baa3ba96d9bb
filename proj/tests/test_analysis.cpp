#include <doctest.h>

#include <cmath>
#include <random>

#include "ibmi/analysis.hpp"
#include "ibmi/factor.hpp"
#include "ibmi/kernels.hpp"
#include "ibmi/partition.hpp"
#include "ibmi/solver.hpp"
#include "oracles.hpp"

using namespace ibmi;
using doctest::Approx;

namespace {

struct Split {
  IndexList i1, i2;
};

Split halves(std::size_t p) {
  const Partition part = contiguous_partition(p, 2, 0.0);
  return {part.sets[0], part.sets[1]};
}

// A_2^{-1} A_21 A_1^{-1} A_12 from the Gauss-Jordan oracle.
DenseMatrix oracle_c(const DenseMatrix& a, const Split& s) {
  const DenseMatrix w1 = oracle::naive_matmul(oracle::gauss_jordan_inverse(gather(a, s.i1, s.i1)), gather(a, s.i1, s.i2));
  const DenseMatrix w2 = oracle::naive_matmul(oracle::gauss_jordan_inverse(gather(a, s.i2, s.i2)), gather(a, s.i2, s.i1));
  return oracle::naive_matmul(w2, w1);
}

// Evenly spaced 1D points with the spacing of the p = 4096 grid.
PointSet fine_grid(std::size_t p) {
  PointSet g;
  const double h = std::pow(4096.0, 0.9) / 4095.0;
  for (std::size_t i = 0; i < p; ++i) g.points.push_back({h * static_cast<double>(i), 0.0});
  return g;
}

}  // namespace

TEST_CASE("contraction factor examples") {
  DenseMatrix a = oracle::random_spd(10, 1);
  const Split s = halves(10);
  for (std::size_t i : s.i1)
    for (std::size_t j : s.i2) a(i, j) = a(j, i) = 0.0;
  CHECK(contraction_factor(a, s.i1, s.i2) == 0.0);

  const DenseMatrix b = oracle::random_spd(24, 2);
  const Split t = halves(24);
  CHECK(contraction_factor(b, t.i1, t.i2) == Approx(oracle::two_norm(oracle_c(b, t))).epsilon(1e-6));
}

TEST_CASE("contraction factor argument checks") {
  const DenseMatrix a = oracle::random_spd(6, 3);
  CHECK_THROWS_AS(contraction_factor(a, {0, 1, 2}, {2, 3, 4, 5}), InvalidArgument);
  CHECK_THROWS_AS(contraction_factor(a, {0, 1}, {3, 4, 5}), InvalidArgument);
  DenseMatrix bad = a;
  bad(0, 0) = -1;
  CHECK_THROWS_AS(contraction_factor(bad, {0, 1, 2}, {3, 4, 5}), NotPositiveDefinite);
}

TEST_CASE("the 2-norm of C can exceed one while its spectral radius stays below one") {
  const DenseMatrix a = kernel_matrix({KernelFamily::RBF, 0.5}, fine_grid(64));
  const Split s = halves(64);
  const ContractionReport r = contraction_report(a, s.i1, s.i2);
  CHECK(r.factor > 1.0);
  CHECK(r.spectral_radius < 1.0);
  CHECK(r.factor == Approx(oracle::two_norm(oracle_c(a, s))).epsilon(1e-6));
  CHECK(r.bound_rate == Approx(r.factor * r.factor));
}

TEST_CASE("spectral radius condition") {
  DenseMatrix a = oracle::random_spd(8, 4);
  const Split s = halves(8);
  for (std::size_t i : s.i1)
    for (std::size_t j : s.i2) a(i, j) = a(j, i) = 0.0;
  CHECK(spectral_radius_condition(a, s.i1, s.i2) == 0.0);

  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = 4 + gen() % 61;
    const DenseMatrix b = oracle::random_spd(p, 900 + trial);
    std::vector<std::size_t> perm(p);
    for (std::size_t i = 0; i < p; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), gen);
    const std::size_t cut = 1 + gen() % (p - 1);
    IndexList i1(perm.begin(), perm.begin() + cut), i2(perm.begin() + cut, perm.end());
    std::sort(i1.begin(), i1.end());
    std::sort(i2.begin(), i2.end());
    const double rho = spectral_radius_condition(b, i1, i2);
    CAPTURE(trial);
    CHECK(rho < 1.0);
    // similar to the I_2-side product C
    CHECK(rho == Approx(contraction_report(b, i1, i2).spectral_radius).epsilon(1e-6));
  }
}

TEST_CASE("lemma recurrence examples") {
  const DenseMatrix a = oracle::random_spd(32, 5);
  const Split s = halves(32);
  const DenseMatrix exact = gather(spd_inverse(a), s.i2, s.i2);
  CHECK(lemma_error_recurrence_check(a, s.i1, s.i2, exact, 3) <= 1e-8);
  CHECK(lemma_error_recurrence_check(a, s.i1, s.i2, DenseMatrix::identity(16), 0) == 0.0);
  CHECK(lemma_error_recurrence_check(a, s.i1, s.i2, DenseMatrix::identity(16), 3) <= 1e-8);
  CHECK_THROWS_AS(lemma_error_recurrence_check(a, s.i1, s.i2, DenseMatrix::identity(15), 1), DimensionMismatch);
  const DenseMatrix big = DenseMatrix::identity(514);
  const Split b = halves(514);
  CHECK_THROWS_AS(lemma_error_recurrence_check(big, b.i1, b.i2, DenseMatrix::identity(257), 1), InvalidArgument);
}

TEST_CASE("lemma recurrence on kernel matrices and uneven splits") {
  const DenseMatrix a = kernel_matrix({KernelFamily::MATERN52, 0.5, 3.0}, grid_1d(100));
  const Partition rb = red_black_partition(100);
  for (std::size_t r : {1, 2, 4})
    CHECK(lemma_error_recurrence_check(a, rb.sets[0], rb.sets[1], DenseMatrix::identity(50), r) <= 1e-8);
  const DenseMatrix b = oracle::random_spd(40, 6);
  IndexList i1{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, i2;
  for (std::size_t i = 10; i < 40; ++i) i2.push_back(i);
  CHECK(lemma_error_recurrence_check(b, i1, i2, DenseMatrix::identity(30), 5) <= 1e-8);
}

TEST_CASE("the error of the I_2 block stays under the bound") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t p = 16 + 24 * seed;
    const DenseMatrix a = oracle::random_spd(p, 300 + seed);
    const Split s = halves(p);
    const double factor = contraction_factor(a, s.i1, s.i2);
    const DenseMatrix exact = gather(spd_inverse(a), s.i2, s.i2);
    const DenseMatrix guess = DenseMatrix::identity(s.i2.size());
    const double e0 = oracle::two_norm(guess - exact);
    DenseMatrix sigma(p, p);
    scatter_add_assign(sigma, s.i2, s.i2, guess);
    for (int r = 1; r <= 10; ++r) {
      block_update(a, sigma, s.i1, s.i2);
      block_update(a, sigma, s.i2, s.i1);
      const double err = two_norm(gather(sigma, s.i2, s.i2) - exact).value;
      CHECK(err <= std::pow(factor, 2 * r) * e0 + 1e-10);
    }
  }
}

TEST_CASE("flop cost without overlap equals the closed form exactly") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t k = 2 + gen() % 9, m = 1 + gen() % 2000;
    const CostBreakdown c = flop_cost(k * m, k, 0.0);
    CHECK(c.h == 0);
    CHECK(c.m == m);
    // (1/3 + 2K^2) K m^3 in thirds
    CHECK(c.total_thirds == (1 + 6 * k * k) * k * m * m * m);
    std::uint64_t sum = 0;
    for (auto v : c.per_step_thirds) sum += v;
    CHECK(sum == c.total_thirds);
  }
  const CostBreakdown c = flop_cost(200, 2, 0.0);
  CHECK(c.total_flops() == Approx(1.667e7).epsilon(1e-3));
  CHECK(c.total_thirds == 50000000);
}

TEST_CASE("flop cost with overlap") {
  const CostBreakdown c = flop_cost(400, 4, 0.1);
  CHECK(c.m == 100);
  CHECK(c.h == 10);
  REQUIRE(c.per_step_thirds.size() == 4);
  const std::uint64_t edge = 110ull * 110 * 110 + 6ull * 16 * 100 * 100 * 110;
  const std::uint64_t inner = 120ull * 120 * 120 + 6ull * 16 * 100 * 100 * 120;
  CHECK(c.per_step_thirds[0] == edge);
  CHECK(c.per_step_thirds[3] == edge);
  CHECK(c.per_step_thirds[1] == inner);
  CHECK(c.total_thirds == 2 * edge + 2 * inner);
  CHECK(c.direct_thirds == 7ull * 400 * 400 * 400);
  CHECK_THROWS_AS(flop_cost(400, 4, 0.5), InvalidOverlap);
  CHECK_THROWS_AS(flop_cost(7, 4, 0.0), TooManyBlocks);
}

TEST_CASE("one sweep is cheaper than the direct inverse in the model") {
  for (std::size_t k = 2; k <= 6; ++k)
    for (std::size_t m : {2, 10, 1000}) {
      const CostBreakdown c = flop_cost(k * m, k, 0.0);
      CHECK(c.total_thirds < c.direct_thirds);
    }
}

TEST_CASE("Newton-Schultz examples") {
  const NewtonSchultzResult id = newton_schultz(DenseMatrix::identity(5), DenseMatrix::identity(5), 1e-12, 10);
  CHECK(id.converged);
  CHECK(id.iterations == 0);
  CHECK(id.x == DenseMatrix::identity(5));

  const NewtonSchultzResult s = newton_schultz(DenseMatrix{{2}}, DenseMatrix{{0.4}}, 1e-14, 50);
  CHECK(s.converged);
  CHECK(s.x(0, 0) == Approx(0.5).epsilon(1e-14));

  // x0 = 2 / lambda_min makes rho(I - A X0) > 1 on an ill-conditioned matrix
  const DenseMatrix a = kernel_matrix({KernelFamily::RBF, 0.7}, grid_1d(64));
  const auto ev = oracle::jacobi_eigenvalues(a);
  const NewtonSchultzResult bad = newton_schultz(a, (1.5 / ev.front()) * DenseMatrix::identity(64), 1e-8, 100);
  CHECK_FALSE(bad.converged);
}

TEST_CASE("Newton-Schultz limit matches the inverse") {
  DenseMatrix a = oracle::random_spd(30, 8);
  const double n = oracle::two_norm(a);
  a = (1.0 / (1.01 * n)) * a;  // eigenvalues in (0, 1), so ||I - A|| < 1
  a.symmetrize();
  REQUIRE(oracle::two_norm(DenseMatrix::identity(30) - a) < 1.0);
  const NewtonSchultzResult r = newton_schultz(a, DenseMatrix::identity(30), 1e-12, 100);
  CHECK(r.converged);
  CHECK(oracle::max_rel_diff(r.x, spd_inverse(a)) <= 1e-8);
  CHECK_THROWS_AS(newton_schultz(a, DenseMatrix::identity(29), 1e-8, 5), DimensionMismatch);
}
