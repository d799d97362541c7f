#include <benchmark/benchmark.h>

#include <random>

#include "hrafl/aggregators.hpp"
#include "hrafl/geometric_median.hpp"
#include "hrafl/hybrid_reputation.hpp"

namespace {

hrafl::UpdateSet random_updates(std::size_t m, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  hrafl::UpdateSet u;
  for (std::size_t j = 0; j < m; ++j) {
    hrafl::ModelParams p = hrafl::ModelParams::zeros(d);
    for (double& w : p.w) w = n(rng);
    p.b = n(rng);
    u.ids.push_back(j);
    u.params.push_back(std::move(p));
  }
  return u;
}

void BM_GeometricMedian(benchmark::State& state) {
  const auto u = random_updates(static_cast<std::size_t>(state.range(0)), 10, 1);
  std::vector<std::vector<double>> pts;
  for (const auto& p : u.params) pts.push_back(hrafl::flatten(p));
  for (auto _ : state) benchmark::DoNotOptimize(hrafl::geometric_median(pts));
}
BENCHMARK(BM_GeometricMedian)->Arg(10)->Arg(50)->Arg(200);

void BM_Krum(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const auto u = random_updates(m, 10, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hrafl::krum_select(u, (m - 3) / 2));
}
BENCHMARK(BM_Krum)->Arg(10)->Arg(50)->Arg(200);

void BM_Bulyan(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const auto u = random_updates(m, 10, 3);
  for (auto _ : state) benchmark::DoNotOptimize(hrafl::bulyan(u, (m - 3) / 4));
}
BENCHMARK(BM_Bulyan)->Arg(11)->Arg(51);

void BM_HraAggregate(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const auto u = random_updates(m, 10, 4);
  const hrafl::HraConfig cfg;
  const auto rep = hrafl::ReputationState::initial(u.ids, cfg.initial_reputation);
  for (auto _ : state) benchmark::DoNotOptimize(hrafl::aggregate_hra(u, rep, cfg));
}
BENCHMARK(BM_HraAggregate)->Arg(10)->Arg(50)->Arg(200);

}  // namespace
