#include <benchmark/benchmark.h>

#include "translit/ctc.hpp"
#include "translit/net.hpp"

using namespace translit;

namespace {

std::vector<SymbolId> ramp_input(int frames, int vocab) {
  std::vector<SymbolId> ids(static_cast<size_t>(frames));
  for (int t = 0; t < frames; ++t) ids[static_cast<size_t>(t)] = t % vocab;
  return ids;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  auto params = random_params<float>({36, 40, 8, hidden, 2}, 7);
  auto input = ramp_input(40, 36);
  for (auto _ : state) {
    auto trace = forward(params, input);
    benchmark::DoNotOptimize(trace.log_probs);
  }
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(64)->Arg(128);

static void BM_ForwardBackward(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  auto params = random_params<float>({36, 40, 8, hidden, 2}, 7);
  auto input = ramp_input(40, 36);
  std::vector<SymbolId> label = {1, 5, 9, 2, 17, 3, 8, 21, 4, 11};
  for (auto _ : state) {
    auto trace = forward(params, input);
    auto ctc = ctc_loss(trace.log_probs, label, 0);
    auto grads = backward(params, trace, ctc.grad);
    benchmark::DoNotOptimize(grads.embedding);
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
