#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "recsql/core/kernels.hpp"

namespace k = recsql::core::kernels;

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <auto Kernel>
void bm_matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 1);
  const auto x = random_values(n, 2);
  std::vector<double> y(n);
  for (auto _ : state) {
    Kernel(a, n, n, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}

template <auto Kernel>
void bm_add_outer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_values(n * n, 1);
  const auto u = random_values(n, 2);
  const auto v = random_values(n, 3);
  for (auto _ : state) {
    Kernel(a, n, n, u, v);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}

}  // namespace

BENCHMARK(bm_matvec<k::serial::matvec>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_matvec<k::parallel::matvec>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_matvec<k::serial::matvec_transposed>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_matvec<k::parallel::matvec_transposed>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_add_outer<k::serial::add_outer>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_add_outer<k::parallel::add_outer>)->Arg(64)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
