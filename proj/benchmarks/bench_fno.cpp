#include <benchmark/benchmark.h>

#include "eitlab/conductivity.hpp"
#include "eitlab/fno_model.hpp"
#include "eitlab/training.hpp"

using namespace eit;

namespace {

RealGrid input(int n) {
  RealGrid g(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) g(a, b) = std::cos(kTwoPi * (a - 2.0 * b) / n);
  }
  return g;
}

}  // namespace

static void BM_FnoForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FnoParams p = init_params(FnoConfig{}, 1);
  const RealGrid x = input(n);
  for (auto _ : state) benchmark::DoNotOptimize(fno_forward(p, x));
}
BENCHMARK(BM_FnoForward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_FnoForwardBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FnoParams p = init_params(FnoConfig{}, 1);
  const RealGrid x = input(n);
  const ConductivityField target = sample_shape(3, n);
  std::vector<double> grad(p.values.size());
  for (auto _ : state) {
    ForwardCache cache;
    const RealGrid y = fno_forward(p, x, &cache);
    fno_backward(p, cache, relative_l1_grad(y, target), grad);
  }
}
BENCHMARK(BM_FnoForwardBackward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_BatchGradient(benchmark::State& state) {
  const int n = 32, batch = static_cast<int>(state.range(0));
  const FnoParams p = init_params(FnoConfig{}, 1);
  std::vector<RealGrid> xs(batch, input(n));
  std::vector<ConductivityField> ts;
  for (int i = 0; i < batch; ++i) ts.push_back(sample_shape(i, n));
  std::vector<const RealGrid*> xp;
  std::vector<const ConductivityField*> tp;
  for (int i = 0; i < batch; ++i) {
    xp.push_back(&xs[i]);
    tp.push_back(&ts[i]);
  }
  std::vector<double> grad;
  for (auto _ : state) benchmark::DoNotOptimize(batch_loss_and_gradient(p, xp, tp, grad));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_BatchGradient)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
