#include <benchmark/benchmark.h>

#include <random>

#include "ibmi/ibmi.hpp"

using namespace ibmi;

namespace {

DenseMatrix rbf(std::size_t p) { return kernel_matrix({KernelFamily::RBF}, grid_1d(p)); }

void gemm_flops(benchmark::State& state, std::size_t n) {
  state.counters["GFlop/s"] = benchmark::Counter(2.0 * n * n * n * state.iterations() / 1e9,
                                                 benchmark::Counter::kIsRate);
}

void BM_MatmulNative(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const DenseMatrix a = rbf(n);
  set_gemm_backend(GemmBackend::Native);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, a));
  set_gemm_backend(blas_available() ? GemmBackend::Blas : GemmBackend::Native);
  gemm_flops(state, n);
}
BENCHMARK(BM_MatmulNative)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_MatmulBlas(benchmark::State& state) {
  if (!blas_available()) {
    state.SkipWithError("built without BLAS");
    return;
  }
  const std::size_t n = state.range(0);
  const DenseMatrix a = rbf(n);
  set_gemm_backend(GemmBackend::Blas);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, a));
  gemm_flops(state, n);
}
BENCHMARK(BM_MatmulBlas)->Arg(256)->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_Cholesky(benchmark::State& state) {
  const DenseMatrix a = rbf(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cholesky(a));
}
BENCHMARK(BM_Cholesky)->Arg(256)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_CholSolve(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const DenseMatrix a = rbf(n);
  const CholeskyFactor f = cholesky(a);
  const DenseMatrix b = DenseMatrix::identity(n);
  for (auto _ : state) benchmark::DoNotOptimize(chol_solve(f, b));
}
BENCHMARK(BM_CholSolve)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SpdInverse(benchmark::State& state) {
  const DenseMatrix a = rbf(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spd_inverse(a));
}
BENCHMARK(BM_SpdInverse)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_IbmiOneSweep(benchmark::State& state) {
  const std::size_t p = state.range(0);
  const DenseMatrix a = rbf(p);
  const Partition part = contiguous_partition(p, 2, 0.2);
  IbmiConfig cfg;
  cfg.max_iterations = 1;
  for (auto _ : state) benchmark::DoNotOptimize(solve(a, part, cfg));
}
BENCHMARK(BM_IbmiOneSweep)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

// Uniform entries give a well separated top singular value, so this measures
// the matvec cost rather than the spectrum of a particular kernel.
void BM_TwoNorm(benchmark::State& state) {
  const std::size_t n = state.range(0);
  DenseMatrix a(n, n);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = u(gen);
  for (auto _ : state) benchmark::DoNotOptimize(two_norm(a));
}
BENCHMARK(BM_TwoNorm)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
