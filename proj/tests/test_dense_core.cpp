#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ibmi/factor.hpp"
#include "ibmi/gemm.hpp"
#include "ibmi/io.hpp"
#include "ibmi/kernels.hpp"
#include "ibmi/matrix.hpp"
#include "ibmi/norms.hpp"
#include "oracles.hpp"

using namespace ibmi;
using doctest::Approx;

namespace {

double rel_frob(const DenseMatrix& x, const DenseMatrix& ref) {
  return oracle::frob(x - ref) / oracle::frob(ref);
}

DenseMatrix reconstruct(const CholeskyFactor& f) { return oracle::naive_matmul(f.l, oracle::naive_transpose(f.l)); }

}  // namespace

TEST_CASE("DenseMatrix basics") {
  CHECK_THROWS_AS(DenseMatrix(0, 3), DimensionMismatch);
  DenseMatrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.size() == 6);
  CHECK(m(1, 2) == 6);
  CHECK(m.transposed() == DenseMatrix{{1, 4}, {2, 5}, {3, 6}});
  CHECK_THROWS_AS(DenseMatrix::from_data(2, 2, {1, 2, 3}), DimensionMismatch);
  DenseMatrix s{{1, 2}, {4, 3}};
  s.symmetrize();
  CHECK(s == DenseMatrix{{1, 3}, {3, 3}});
}

TEST_CASE("cholesky examples") {
  CHECK(cholesky(DenseMatrix::identity(3)).l == DenseMatrix::identity(3));

  const CholeskyFactor f = cholesky(DenseMatrix{{4, 2}, {2, 3}});
  CHECK(f.l(0, 0) == Approx(2.0));
  CHECK(f.l(0, 1) == 0.0);
  CHECK(f.l(1, 0) == Approx(1.0));
  CHECK(f.l(1, 1) == Approx(std::sqrt(2.0)));
  CHECK(rel_frob(reconstruct(f), DenseMatrix{{4, 2}, {2, 3}}) <= 1e-14);

  const DenseMatrix rbf = kernel_matrix({KernelFamily::RBF}, grid_1d(64));
  const CholeskyFactor fr = cholesky(rbf);
  for (std::size_t i = 0; i < 64; ++i) CHECK(fr.l(i, i) > 0.0);
}

TEST_CASE("cholesky errors") {
  CHECK_THROWS_AS(cholesky(DenseMatrix(2, 3)), DimensionMismatch);
  try {
    cholesky(DenseMatrix{{1, 2}, {2, 1}});
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.step() == 1);
  }
  CHECK_THROWS_AS(cholesky(DenseMatrix{{-1, 0}, {0, 1}}), NotPositiveDefinite);
  CHECK_THROWS_AS(cholesky(DenseMatrix{{2, 1}, {0, 2}}), InvalidArgument);
}

TEST_CASE("cholesky round trip on random SPD, including blocked sizes") {
  for (std::size_t p : {1, 5, 17, 64, 97, 200, 301}) {
    const DenseMatrix a = oracle::random_spd(p, 7 * p);
    const CholeskyFactor f = cholesky(a);
    CHECK(rel_frob(reconstruct(f), a) <= 1e-10);
    for (std::size_t i = 0; i < p; ++i) {
      CHECK(f.l(i, i) > 0.0);
      for (std::size_t j = i + 1; j < p; ++j) REQUIRE(f.l(i, j) == 0.0);
    }
  }
}

TEST_CASE("ldlt examples") {
  const LdlFactor id = ldlt(DenseMatrix::identity(4));
  CHECK(id.l == DenseMatrix::identity(4));
  CHECK(id.d == std::vector<double>{1, 1, 1, 1});

  const LdlFactor f = ldlt(DenseMatrix{{4, 2}, {2, 3}});
  CHECK(f.l(1, 0) == Approx(0.5));
  CHECK(f.l(0, 1) == 0.0);
  CHECK(f.d[0] == Approx(4.0));
  CHECK(f.d[1] == Approx(2.0));

  const LdlFactor g = ldlt(DenseMatrix{{2, 0, 0}, {0, 5, 0}, {0, 0, 7}});
  CHECK(g.l == DenseMatrix::identity(3));
  CHECK(g.d == std::vector<double>{2, 5, 7});

  CHECK_THROWS_AS(ldlt(DenseMatrix{{1, 1}, {1, 1}}), ZeroPivot);
}

TEST_CASE("ldlt reconstructs symmetric input, indefinite included") {
  for (std::size_t p : {3, 20, 90}) {
    DenseMatrix a = oracle::random_spd(p, p + 11);
    a(0, 0) = -a(0, 0);  // indefinite but still factorizable without pivoting
    const LdlFactor f = ldlt(a);
    DenseMatrix ld = f.l;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) ld(i, j) *= f.d[j];
    CHECK(rel_frob(oracle::naive_matmul(ld, oracle::naive_transpose(f.l)), a) <= 1e-10);
    for (std::size_t i = 0; i < p; ++i) CHECK(f.l(i, i) == 1.0);
  }
  const LdlFactor spd = ldlt(oracle::random_spd(30, 3));
  for (double d : spd.d) CHECK(d > 0.0);
}

TEST_CASE("chol_solve examples") {
  const DenseMatrix b = oracle::random_matrix(3, 2, 1);
  CHECK(oracle::max_rel_diff(chol_solve(cholesky(DenseMatrix::identity(3)), b), b) <= 1e-15);

  const DenseMatrix x = chol_solve(cholesky(DenseMatrix{{4, 2}, {2, 3}}), DenseMatrix{{1}, {0}});
  CHECK(x(0, 0) == Approx(0.375));
  CHECK(x(1, 0) == Approx(-0.25));

  const DenseMatrix d = chol_solve(cholesky(DenseMatrix{{2, 0}, {0, 4}}), DenseMatrix::identity(2));
  CHECK(d(0, 0) == Approx(0.5));
  CHECK(d(1, 1) == Approx(0.25));
  CHECK(d(0, 1) == 0.0);

  CHECK_THROWS_AS(chol_solve(cholesky(DenseMatrix::identity(3)), DenseMatrix(2, 1)), DimensionMismatch);
}

TEST_CASE("chol_solve residual") {
  const DenseMatrix a = oracle::random_spd(150, 5);
  const DenseMatrix b = oracle::random_matrix(150, 7, 6);
  const DenseMatrix x = chol_solve(cholesky(a), b);
  CHECK(oracle::frob(oracle::naive_matmul(a, x) - b) / oracle::frob(b) <= 1e-10);
}

TEST_CASE("spd_inverse examples") {
  CHECK(spd_inverse(DenseMatrix::identity(5)) == DenseMatrix::identity(5));
  const DenseMatrix d = spd_inverse(DenseMatrix{{2, 0, 0}, {0, 4, 0}, {0, 0, 8}});
  CHECK(oracle::max_rel_diff(d, DenseMatrix{{0.5, 0, 0}, {0, 0.25, 0}, {0, 0, 0.125}}) <= 1e-15);
  const DenseMatrix t = spd_inverse(DenseMatrix{{4, 2}, {2, 3}});
  CHECK(oracle::max_rel_diff(t, DenseMatrix{{3.0 / 8, -2.0 / 8}, {-2.0 / 8, 4.0 / 8}}) <= 1e-15);
  CHECK_THROWS_AS(spd_inverse(DenseMatrix{{1, 2}, {2, 1}}), NotPositiveDefinite);
}

TEST_CASE("spd_inverse matches Gauss-Jordan and is exactly symmetric") {
  for (std::size_t p : {2, 9, 32, 64}) {
    const DenseMatrix a = oracle::random_spd(p, 100 + p);
    const DenseMatrix inv = spd_inverse(a);
    CHECK(oracle::max_rel_diff(inv, oracle::gauss_jordan_inverse(a)) <= 1e-8);
    CHECK(inv == inv.transposed());
  }
}

TEST_CASE("spd_inverse residual on a kernel matrix") {
  const DenseMatrix a = kernel_matrix({KernelFamily::RBF, 0.5}, grid_1d(300));
  const DenseMatrix inv = spd_inverse(a);
  CHECK(oracle::two_norm(oracle::naive_matmul(a, inv) - DenseMatrix::identity(300)) <= 1e-8);
}

TEST_CASE("matmul examples") {
  const DenseMatrix a = oracle::random_matrix(5, 4, 2);
  CHECK(matmul(a, DenseMatrix::identity(4)) == a);
  CHECK(matmul(DenseMatrix{{1, 2}, {3, 4}}, DenseMatrix{{5}, {6}}) == DenseMatrix{{17}, {39}});
  CHECK(matmul(DenseMatrix{{1, 1, 1}}, DenseMatrix(3, 1, 1.0)) == DenseMatrix{{3}});
  CHECK_THROWS_AS(matmul(DenseMatrix(2, 3), DenseMatrix(2, 3)), DimensionMismatch);
}

TEST_CASE("matmul agrees with the naive product for every backend and tile size") {
  const std::size_t tile0 = matmul_tile_size();
  const GemmBackend backend0 = gemm_backend();
  std::vector<GemmBackend> backends{GemmBackend::Native};
  if (blas_available()) backends.push_back(GemmBackend::Blas);
  for (GemmBackend be : backends) {
    set_gemm_backend(be);
    for (std::size_t tile : {8, 64, 100}) {
      set_matmul_tile_size(tile);
      for (auto [m, k, n] : {std::array<std::size_t, 3>{1, 1, 1}, {7, 3, 5}, {65, 129, 33}, {200, 150, 257}}) {
        const DenseMatrix a = oracle::random_matrix(m, k, m * 31 + k);
        const DenseMatrix b = oracle::random_matrix(k, n, n * 17 + k);
        const DenseMatrix ref = oracle::naive_matmul(a, b);
        CHECK(oracle::max_rel_diff(matmul(a, b), ref) <= 1e-13);
        CHECK(oracle::max_rel_diff(matmul(a.transposed(), Trans::Yes, b, Trans::No), ref) <= 1e-13);
        CHECK(oracle::max_rel_diff(matmul(a, Trans::No, b.transposed(), Trans::Yes), ref) <= 1e-13);
      }
    }
  }
  set_matmul_tile_size(tile0);
  set_gemm_backend(backend0);
}

TEST_CASE("gemm accumulates into a sub-block view") {
  const DenseMatrix a = oracle::random_matrix(6, 4, 3);
  const DenseMatrix b = oracle::random_matrix(4, 5, 4);
  DenseMatrix c(10, 10, 1.0);
  gemm(2.0, a.view(), Trans::No, b.view(), Trans::No, -1.0, c.view().block(2, 3, 6, 5));
  const DenseMatrix ab = oracle::naive_matmul(a, b);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      const bool inside = i >= 2 && i < 8 && j >= 3 && j < 8;
      const double expect = inside ? 2.0 * ab(i - 2, j - 3) - 1.0 : 1.0;
      CHECK(c(i, j) == Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("two_norm examples") {
  CHECK(two_norm(DenseMatrix::identity(7)).value == Approx(1.0).epsilon(1e-12));
  CHECK(two_norm(DenseMatrix{{3, 0, 0}, {0, 1, 0}, {0, 0, 0.5}}).value == Approx(3.0).epsilon(1e-9));
  const NormEstimate n = two_norm(DenseMatrix{{0, 2}, {0, 0}});
  CHECK(n.value == Approx(2.0).epsilon(1e-12));
  CHECK(n.converged);
}

TEST_CASE("two_norm matches the Jacobi oracle") {
  for (std::size_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = oracle::random_matrix(20 + seed, 15 + 2 * seed, seed);
    const double ref = oracle::two_norm(a);
    const NormEstimate est = two_norm(a);
    CHECK(est.converged);
    CHECK(est.value == Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("two_norm finds a dominant vector orthogonal to all-ones") {
  const DenseMatrix a{{5, -5}, {0, 0}};
  CHECK(two_norm(a).value == Approx(oracle::two_norm(a)).epsilon(1e-9));
  // odd top singular vector, even runner-up
  const DenseMatrix b{{3, 1, -2}, {1, 3, -2}, {-2, -2, 1}};
  const DenseMatrix c{{2, 0, -2}, {0, 1, 0}, {-2, 0, 2}};
  CHECK(two_norm(b).value == Approx(oracle::two_norm(b)).epsilon(1e-9));
  CHECK(two_norm(c).value == Approx(4.0).epsilon(1e-9));
}

TEST_CASE("two_norm flags non-convergence at the iteration cap") {
  PowerIterationSettings s;
  s.max_iterations = 3;
  const DenseMatrix a = oracle::random_matrix(40, 40, 9);
  const NormEstimate est = two_norm(a, s);
  CHECK_FALSE(est.converged);
  CHECK(est.value > 0.0);
}

TEST_CASE("two_norm is an upper bound for probe vectors") {
  const DenseMatrix a = oracle::random_matrix(30, 25, 12);
  const double n = two_norm(a).value;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DenseMatrix v = oracle::random_matrix(25, 1, 1000 + seed);
    const double ratio = oracle::frob(oracle::naive_matmul(a, v)) / oracle::frob(v);
    CHECK(n >= ratio - 1e-6);
  }
}

TEST_CASE("gather examples and errors") {
  const DenseMatrix a = oracle::random_matrix(4, 4, 1);
  const IndexList all{0, 1, 2, 3};
  CHECK(gather(a, all, all) == a);
  CHECK(gather(DenseMatrix::identity(4), IndexList{0, 2}, IndexList{0, 2}) == DenseMatrix::identity(2));
  CHECK(gather(DenseMatrix{{1, 2}, {3, 4}}, IndexList{1}, IndexList{0}) == DenseMatrix{{3}});
  CHECK_THROWS_AS(gather(a, IndexList{4}, IndexList{0}), IndexOutOfRange);
}

TEST_CASE("scatter examples and errors") {
  const DenseMatrix src = oracle::random_matrix(3, 3, 2);
  DenseMatrix t(3, 3);
  scatter_add_assign(t, IndexList{0, 1, 2}, IndexList{0, 1, 2}, src);
  CHECK(t == src);

  DenseMatrix z(2, 2);
  scatter_add_assign(z, IndexList{1}, IndexList{1}, DenseMatrix{{9}});
  CHECK(z == DenseMatrix{{0, 0}, {0, 9}});

  scatter_add_assign(z, IndexList{1}, IndexList{1}, DenseMatrix{{1}}, ScatterMode::Add);
  CHECK(z(1, 1) == 10);

  CHECK_THROWS_AS(scatter_add_assign(z, IndexList{2}, IndexList{0}, DenseMatrix{{1}}), IndexOutOfRange);
  CHECK_THROWS_AS(scatter_add_assign(z, IndexList{0, 1}, IndexList{0}, DenseMatrix{{1}}), DimensionMismatch);
}

TEST_CASE("gather/scatter round trip leaves the matrix unchanged") {
  const DenseMatrix a = oracle::random_matrix(9, 7, 5);
  const IndexList rows{8, 0, 3}, cols{6, 2};
  DenseMatrix b = a;
  scatter_add_assign(b, rows, cols, gather(b, rows, cols));
  CHECK(b == a);
}

TEST_CASE("condition_number_2 examples") {
  CHECK(condition_number_2(DenseMatrix::identity(10)).value == Approx(1.0).epsilon(1e-9));
  CHECK(condition_number_2(DenseMatrix{{100, 0}, {0, 1}}).value == Approx(100.0).epsilon(1e-9));
  CHECK_THROWS_AS(condition_number_2(DenseMatrix{{1, 2}, {2, 1}}), NotPositiveDefinite);
}

TEST_CASE("condition_number_2 matches the Jacobi spectrum") {
  const DenseMatrix a = kernel_matrix({KernelFamily::RBF, 0.5}, grid_1d(120));
  const auto ev = oracle::jacobi_eigenvalues(a);
  const double want = ev.back() / ev.front();
  CHECK(condition_number_2(a).value == Approx(want).epsilon(1e-3));
  CHECK(condition_number_2(a, {1e-13, 50000, 7}).value == Approx(want).epsilon(1e-6));
}

TEST_CASE("IBMI1 binary round trip") {
  const DenseMatrix a = oracle::random_matrix(3, 5, 8);
  std::stringstream buf;
  io::write_binary(buf, a);
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 8 + 16 + 15 * 8);
  CHECK(bytes.substr(0, 8) == std::string("IBMI1\0\0\0", 8));
  CHECK(static_cast<unsigned char>(bytes[8]) == 3);
  CHECK(static_cast<unsigned char>(bytes[16]) == 5);
  CHECK(io::read_binary(buf) == a);

  std::stringstream bad(std::string("NOTIBMI1"));
  CHECK_THROWS_AS(io::read_binary(bad), IoError);
  std::stringstream truncated(bytes.substr(0, 30));
  CHECK_THROWS_AS(io::read_binary(truncated), IoError);
}

TEST_CASE("CSV round trip is exact") {
  DenseMatrix a = oracle::random_matrix(4, 3, 9);
  a(0, 0) = 0.1;
  a(1, 1) = 1e-300;
  a(2, 2) = -123456789.125;
  std::stringstream buf;
  io::write_csv(buf, a);
  CHECK(io::read_csv(buf) == a);

  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(io::read_csv(ragged), IoError);
  std::stringstream junk("1,x\n");
  CHECK_THROWS_AS(io::read_csv(junk), IoError);
}
