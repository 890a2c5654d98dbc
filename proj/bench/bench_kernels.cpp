// Serial reference vs OpenMP kernels, plus one full solver step.

#include <benchmark/benchmark.h>

#include <vector>

#include "falm/benchgen.hpp"
#include "falm/kernels.hpp"
#include "falm/rng.hpp"
#include "falm/solver.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  falm::SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

void BM_DotSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n, 1), b = random_vector(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(falm::kernels::serial::dot(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DotOmp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n, 1), b = random_vector(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(falm::kernels::omp::dot(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel, bool Transposed>
void BM_Gemv(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  const auto a = random_vector(rows * cols, 3);
  const auto x = random_vector(Transposed ? rows : cols, 4);
  std::vector<double> y(Transposed ? cols : rows);
  for (auto _ : state) {
    if constexpr (Parallel && Transposed) falm::kernels::omp::gemv_t(rows, cols, a, x, y);
    if constexpr (Parallel && !Transposed) falm::kernels::omp::gemv(rows, cols, a, x, y);
    if constexpr (!Parallel && Transposed) falm::kernels::serial::gemv_t(rows, cols, a, x, y);
    if constexpr (!Parallel && !Transposed) falm::kernels::serial::gemv(rows, cols, a, x, y);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_SolverStep(benchmark::State& state) {
  falm::GenSpec spec;
  spec.n = static_cast<std::size_t>(state.range(0));
  spec.p = spec.n / 5;
  const falm::Generated gen = falm::generate(spec);
  falm::SolverParams params;
  params.rule = falm::InertialRule::chambolle_dossal(4.0);
  const falm::ValidatedConfig cfg = falm::validate(gen.problem, params);
  const std::vector<double> x0(gen.problem.n(), 0.0), l0(gen.problem.p(), 0.0);
  falm::IterateState st = falm::initial_state(gen.problem, cfg, x0, l0);
  for (auto _ : state) {
    st = falm::step(gen.problem, cfg, st).state;
  }
}

}  // namespace

BENCHMARK(BM_DotSerial)->RangeMultiplier(8)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_DotOmp)->RangeMultiplier(8)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_Gemv<false, false>)->Args({64, 512})->Args({512, 4096})->Args({2048, 8192});
BENCHMARK(BM_Gemv<true, false>)->Args({64, 512})->Args({512, 4096})->Args({2048, 8192});
BENCHMARK(BM_Gemv<false, true>)->Args({64, 512})->Args({512, 4096})->Args({2048, 8192});
BENCHMARK(BM_Gemv<true, true>)->Args({64, 512})->Args({512, 4096})->Args({2048, 8192});
BENCHMARK(BM_SolverStep)->Arg(50)->Arg(200)->Arg(500);

BENCHMARK_MAIN();
