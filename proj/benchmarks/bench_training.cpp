#include <benchmark/benchmark.h>

#include "hrafl/data.hpp"
#include "hrafl/metrics.hpp"
#include "hrafl/model.hpp"

namespace {

hrafl::PreparedData dataset(std::size_t n) {
  hrafl::SyntheticSpec spec;
  spec.n_train = n;
  spec.n_test = n / 4;
  spec.features = 10;
  return hrafl::generate_synthetic(spec, 5);
}

void BM_TrainLocal(benchmark::State& state) {
  const auto data = dataset(static_cast<std::size_t>(state.range(0)));
  hrafl::TrainConfig cfg;
  const auto start = hrafl::ModelParams::zeros(data.train.features());
  for (auto _ : state) benchmark::DoNotOptimize(hrafl::train_local(start, data.train, cfg, cfg.eta0));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(cfg.epochs));
}
BENCHMARK(BM_TrainLocal)->Arg(2000)->Arg(20000);

void BM_RocAuc(benchmark::State& state) {
  const auto data = dataset(static_cast<std::size_t>(state.range(0)) * 4);
  std::vector<double> scores(data.test.X.rows());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = data.test.X(i, 0);
  for (auto _ : state) benchmark::DoNotOptimize(hrafl::roc_auc(scores, data.test.y));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

}  // namespace
