#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "imot/otsu.hpp"

namespace {

std::vector<double> contaminated(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> r(n);
  for (auto& x : r) x = u(rng) < 0.3 ? 0.02 * u(rng) : 3.0 * u(rng);
  return r;
}

void BM_Histogram(benchmark::State& state) {
  const auto r = contaminated(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(imot::build_histogram(r));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Histogram)->RangeMultiplier(10)->Range(100, 100000);

void BM_Multilayer(benchmark::State& state) {
  const auto r = contaminated(static_cast<std::size_t>(state.range(0)), 2);
  const int layers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(imot::multilayer_threshold(r, imot::kDefaultIntervalCount, layers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Multilayer)->ArgsProduct({{100, 1000, 10000}, {1, 2, 3, 4}});

}  // namespace
