#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "wef/ann.hpp"
#include "wef/cart.hpp"
#include "wef/cuckoo.hpp"
#include "wef/ensemble.hpp"
#include "wef/features.hpp"
#include "wef/gpr.hpp"
#include "wef/synth.hpp"

namespace {

using namespace wef;

struct Fixture {
  MarketPanel panel = generate_synth_market({});
  FeatureDataset train;
  Fixture() {
    auto data = build_dataset(panel, 0, FeatureConfig::daily());
    auto parts = split(data, {});
    train = Normalization::fit(parts.train).apply(parts.train);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_BuildDataset(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_dataset(f.panel, 0, FeatureConfig::daily()));
}
BENCHMARK(BM_BuildDataset)->Unit(benchmark::kMillisecond);

void BM_AnnTrainLm(benchmark::State& state) {
  const auto& f = fixture();
  LmParams p;
  p.max_epochs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ann_train_lm(ann_init(11, 1), f.train, p));
}
BENCHMARK(BM_AnnTrainLm)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_AnnForward(benchmark::State& state) {
  const auto m = ann_init(11, 1);
  const auto& x = fixture().train.front().features;
  for (auto _ : state) benchmark::DoNotOptimize(m.forward(x));
}
BENCHMARK(BM_AnnForward);

void BM_CartGrowPrune(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(cart_prune(cart_grow(f.train, {}), f.train, {}));
}
BENCHMARK(BM_CartGrowPrune)->Unit(benchmark::kMillisecond);

void BM_GprFit(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(gpr_fit(f.train, {}, 0.5));
}
BENCHMARK(BM_GprFit)->Unit(benchmark::kMillisecond);

void BM_GprPredict(benchmark::State& state) {
  const auto& f = fixture();
  const auto m = gpr_fit(f.train, {}, 0.5);
  const auto& x = f.train[17].features;
  for (auto _ : state) benchmark::DoNotOptimize(m.predict(x));
}
BENCHMARK(BM_GprPredict)->Unit(benchmark::kMicrosecond);

void BM_CuckooSearch(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  LearnerOutputs o;
  for (int i = 0; i < 81; ++i) {
    const double p = 100.0 + i;
    o.actual.push_back(p);
    o.ann.push_back(p + z(rng));
    o.cart.push_back(p + 2 * z(rng));
    o.gpr.push_back(p + 0.5 * z(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(optimize_weights(o, {}));
}
BENCHMARK(BM_CuckooSearch)->Unit(benchmark::kMillisecond);

void BM_TrainEnsemble(benchmark::State& state) {
  const auto& f = fixture();
  EnsembleParams p;
  p.created = "bench";
  for (auto _ : state) benchmark::DoNotOptimize(train_ensemble(f.panel, 0, p));
}
BENCHMARK(BM_TrainEnsemble)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
