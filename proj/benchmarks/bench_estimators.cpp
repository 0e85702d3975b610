#include <benchmark/benchmark.h>

#include "imot/baselines.hpp"
#include "imot/estimator.hpp"
#include "imot/problems/registration.hpp"
#include "imot/synth.hpp"

namespace {

constexpr double kSigma = 0.01;

imot::synth::RegistrationInstance make_instance(const benchmark::State& state) {
  imot::synth::GeneratorSpec spec;
  spec.n = static_cast<std::size_t>(state.range(0));
  spec.noise_sigma = kSigma;
  spec.outlier_ratio = static_cast<double>(state.range(1)) / 100.0;
  spec.seed = 7;
  return imot::synth::gen_registration(spec);
}

void BM_Imot(benchmark::State& state) {
  const auto inst = make_instance(state);
  const imot::problems::Registration adapter(inst.measurements);
  imot::EstimatorConfig config;
  config.layers = imot::recommended_layer_count(inst.measurements.size());
  config.noise_bound = 5 * kSigma;
  for (auto _ : state) benchmark::DoNotOptimize(imot::imot(adapter, config));
}

void BM_GncTls(benchmark::State& state) {
  const auto inst = make_instance(state);
  const imot::problems::Registration adapter(inst.measurements);
  for (auto _ : state) benchmark::DoNotOptimize(imot::baselines::gnc_tls(adapter, {5 * kSigma}));
}

void BM_Adapt(benchmark::State& state) {
  const auto inst = make_instance(state);
  const imot::problems::Registration adapter(inst.measurements);
  for (auto _ : state) benchmark::DoNotOptimize(imot::baselines::adapt_trim(adapter, {5 * kSigma}));
}

void BM_Ransac(benchmark::State& state) {
  const auto inst = make_instance(state);
  const imot::problems::Registration adapter(inst.measurements);
  for (auto _ : state) benchmark::DoNotOptimize(imot::baselines::ransac(adapter, {5 * kSigma, 200, 0.99, 3}));
}

// Args: point count, outlier percentage. 90% is only attempted with 1000 points.
void cases(benchmark::internal::Benchmark* b) {
  for (int ratio : {10, 50, 70}) b->Args({100, ratio});
  for (int ratio : {10, 50, 90}) b->Args({1000, ratio});
}

BENCHMARK(BM_Imot)->Apply(cases);
BENCHMARK(BM_GncTls)->Apply(cases);
BENCHMARK(BM_Adapt)->Apply(cases);
BENCHMARK(BM_Ransac)->Apply(cases);

}  // namespace
