#include <benchmark/benchmark.h>

#include "roomgeo/dataset.hpp"
#include "roomgeo/model.hpp"
#include "roomgeo/rng.hpp"
#include "roomgeo/schroeder.hpp"

using namespace roomgeo;

namespace {

Tensor random_input(std::int64_t n) {
  Tensor input({n, GeometryModel::kInputLength});
  Rng rng(1);
  for (std::int64_t i = 0; i < input.numel(); ++i) input[i] = rng.uniform(-0.05, 0.05);
  return input;
}

void BM_EstimateSingle(benchmark::State& state) {
  GeometryModel model(1);
  model.set_mode(Mode::kEval);
  const Tensor input = random_input(1);
  for (auto _ : state) {
    Tensor out = model.estimate_batch(input);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_EstimateSingle)->Unit(benchmark::kMicrosecond);

void BM_EstimateBatch(benchmark::State& state) {
  GeometryModel model(1);
  model.set_mode(Mode::kEval);
  const Tensor input = random_input(state.range(0));
  for (auto _ : state) {
    Tensor out = model.estimate_batch(input);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateBatch)->Arg(1)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  GeometryModel model(1);
  model.set_mode(Mode::kTrain);
  const Tensor input = random_input(state.range(0));
  Tensor target({state.range(0), 3}, 6.0);
  for (auto _ : state) {
    const Tensor pred = model.forward(input);
    model.zero_grad();
    Tensor grad_in = model.backward(mse_loss_backward(pred, target));
    benchmark::DoNotOptimize(grad_in.data());
  }
}
BENCHMARK(BM_TrainStep)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SimulateRir(benchmark::State& state) {
  std::array<double, 6> beta;
  beta.fill(0.85);
  const RoomSpec room = RoomSpec::make({7.2, 6.1, 4.8}, beta);
  const SourceReceiverPair pair{{2.1, 1.7, 1.4}, {5.0, 4.2, 3.1}};
  ImageSourceConfig cfg;
  cfg.n_samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Rir rir = simulate_rir(room, pair, cfg);
    benchmark::DoNotOptimize(rir.samples.data());
  }
}
BENCHMARK(BM_SimulateRir)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_MeasureRt60(benchmark::State& state) {
  const Vec3 dims{7.2, 6.1, 4.8};
  const RoomSpec room = RoomSpec::make(dims, rt60_to_beta(dims, 0.6), 0.6);
  const Rir rir = simulate_rir(room, SourceReceiverPair{{2.1, 1.7, 1.4}, {5.0, 4.2, 3.1}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(measure_rt60(rir));
  }
}
BENCHMARK(BM_MeasureRt60)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
