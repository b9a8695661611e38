#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "safeml/classifiers.hpp"
#include "safeml/datasets.hpp"
#include "safeml/distances.hpp"
#include "safeml/monitor.hpp"

namespace {

std::vector<double> normal_sample(std::size_t n, double mean, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(mean, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = g(rng);
  return out;
}

void BM_AllDistances(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const safeml::Ecdf a(normal_sample(n, 0.0, 1));
  const safeml::Ecdf b(normal_sample(n, 0.3, 2));
  for (auto _ : state) benchmark::DoNotOptimize(safeml::all_distances(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AllDistances)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_EcdfBuild(benchmark::State& state) {
  const auto sample = normal_sample(static_cast<std::size_t>(state.range(0)), 0.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(safeml::Ecdf(sample));
}
BENCHMARK(BM_EcdfBuild)->Range(64, 16384);

void BM_KnnPredict(benchmark::State& state) {
  const auto train = safeml::gen_xor(static_cast<std::size_t>(state.range(0)), 0.02, 4);
  const auto model = safeml::fit(safeml::Algorithm::KNN, {}, train);
  const auto field = safeml::gen_xor(500, 0.02, 5).features;
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(field));
}
BENCHMARK(BM_KnnPredict)->Arg(500)->Arg(2000)->Arg(8000);

void BM_EvaluateBuffer(benchmark::State& state) {
  const auto raw = safeml::gen_xor(2000, 0.02, 6);
  auto scaler = safeml::fit_scaler(raw);
  const auto scaled = safeml::apply_scaler(scaler, raw);
  auto model = safeml::fit(safeml::Algorithm::CART, {}, scaled);
  const auto profile = safeml::build_profile(scaled, std::move(model), std::move(scaler));
  safeml::MonitorConfig config;
  config.buffer_size = static_cast<std::size_t>(state.range(0));
  const auto field = safeml::apply_scaler(profile.scaler, safeml::gen_xor(config.buffer_size, 0.02, 7).features);
  const auto predicted = profile.model.predict(field);
  for (auto _ : state) benchmark::DoNotOptimize(safeml::evaluate_buffer(profile, config, field, predicted));
}
BENCHMARK(BM_EvaluateBuffer)->Arg(100)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
