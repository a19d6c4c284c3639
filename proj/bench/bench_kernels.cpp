// Serial reference vs OpenMP kernels, and the two exhaustive enumerations.
//
//   ./build/bench/bench_kernels --benchmark_min_time=0.2s

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "rieszlab/kernels.hpp"
#include "rieszlab/optimizer.hpp"

namespace {

std::vector<double> random_cloud(std::size_t n, std::size_t dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> coords(n * dim);
  for (auto& c : coords) c = u(rng);
  return coords;
}

void BM_PotentialRowsSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto coords = random_cloud(n, 2, 7);
  std::vector<double> rows(n);
  for (auto _ : state) {
    auto ext = rieszlab::kernels::serial::potential_rows(coords, 2, 3.0, rows);
    benchmark::DoNotOptimize(ext);
    benchmark::DoNotOptimize(rows.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_PotentialRowsOmp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto coords = random_cloud(n, 2, 7);
  std::vector<double> rows(n);
  for (auto _ : state) {
    auto ext = rieszlab::kernels::omp::potential_rows(coords, 2, 3.0, rows);
    benchmark::DoNotOptimize(ext);
    benchmark::DoNotOptimize(rows.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_GradientSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto coords = random_cloud(n, 2, 11);
  std::vector<double> grad(coords.size());
  for (auto _ : state) {
    rieszlab::kernels::serial::energy_gradient(coords, 2, 2.5, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}

void BM_GradientOmp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto coords = random_cloud(n, 2, 11);
  std::vector<double> grad(coords.size());
  for (auto _ : state) {
    rieszlab::kernels::omp::energy_gradient(coords, 2, 2.5, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}

void BM_ExhaustiveReference(benchmark::State& state) {
  const rieszlab::SetSpec set = rieszlab::example_fractal();
  rieszlab::ExhaustiveOptions opts;
  opts.depth = 2;
  for (auto _ : state) {
    auto r = rieszlab::minimize_exhaustive_reference(set, static_cast<std::size_t>(state.range(0)), 3.0, opts);
    benchmark::DoNotOptimize(r.energy.total);
  }
}

void BM_ExhaustiveParallel(benchmark::State& state) {
  const rieszlab::SetSpec set = rieszlab::example_fractal();
  rieszlab::ExhaustiveOptions opts;
  opts.depth = 2;
  for (auto _ : state) {
    auto r = rieszlab::minimize_exhaustive(set, static_cast<std::size_t>(state.range(0)), 3.0, opts);
    benchmark::DoNotOptimize(r.energy.total);
  }
}

}  // namespace

BENCHMARK(BM_PotentialRowsSerial)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_PotentialRowsOmp)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_GradientSerial)->Arg(256)->Arg(2048);
BENCHMARK(BM_GradientOmp)->Arg(256)->Arg(2048);
BENCHMARK(BM_ExhaustiveReference)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExhaustiveParallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
