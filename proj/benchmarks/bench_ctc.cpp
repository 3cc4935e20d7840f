#include <random>

#include <benchmark/benchmark.h>

#include "translit/ctc.hpp"

using namespace translit;

namespace {

Mat<float> random_log_probs(int frames, int vocab, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-2.0f, 2.0f);
  Mat<float> lp(frames, vocab);
  for (int t = 0; t < frames; ++t) {
    for (int v = 0; v < vocab; ++v) lp(t, v) = dist(rng);
    float m = lp.row(t).maxCoeff();
    float lse = m + std::log((lp.row(t).array() - m).exp().sum());
    lp.row(t).array() -= lse;
  }
  return lp;
}

std::vector<SymbolId> random_label(int len, int vocab, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<SymbolId> sym(1, vocab - 1);
  std::vector<SymbolId> label(static_cast<size_t>(len));
  for (auto& c : label) c = sym(rng);
  return label;
}

}  // namespace

static void BM_CtcLoss(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  const int vocab = 36;
  Mat<float> lp = random_log_probs(frames, vocab, 1);
  auto label = random_label(frames / 2 - 1, vocab, 2);
  for (auto _ : state) {
    auto res = ctc_loss(lp, label, 0);
    benchmark::DoNotOptimize(res.loss);
  }
}
BENCHMARK(BM_CtcLoss)->Arg(20)->Arg(40)->Arg(80);

static void BM_GreedyDecode(benchmark::State& state) {
  Mat<float> lp = random_log_probs(static_cast<int>(state.range(0)), 36, 3);
  for (auto _ : state) {
    auto out = greedy_decode(lp, 0);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_GreedyDecode)->Arg(40)->Arg(80);

static void BM_BeamDecode(benchmark::State& state) {
  Mat<float> lp = random_log_probs(40, 36, 4);
  const int width = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto hyps = beam_decode(lp, width, std::min(width, 5), 0);
    benchmark::DoNotOptimize(hyps);
  }
}
BENCHMARK(BM_BeamDecode)->Arg(4)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
