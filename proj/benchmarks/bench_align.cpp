#include <random>

#include <benchmark/benchmark.h>

#include "translit/align.hpp"
#include "translit/edit_distance.hpp"

using namespace translit;

namespace {

MappingTable bench_table() {
  MappingTable t;
  for (char32_t c = U'A'; c <= U'Z'; ++c) t.forward[c] = std::u32string(1, c + 32);
  t.forward[U'\''] = U"";
  return t;
}

std::vector<std::u32string> random_words(int n, int max_len, bool upper, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::u32string> words(static_cast<size_t>(n));
  for (auto& w : words) {
    size_t len = 1 + rng() % static_cast<size_t>(max_len);
    for (size_t i = 0; i < len; ++i) {
      w += static_cast<char32_t>((upper ? U'A' : U'a') + rng() % 26);
    }
  }
  return words;
}

}  // namespace

static void BM_EditDistance(benchmark::State& state) {
  auto a = random_words(1, static_cast<int>(state.range(0)), false, 1)[0];
  auto b = random_words(1, static_cast<int>(state.range(0)), false, 2)[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(edit_distance(a, b));
  }
}
BENCHMARK(BM_EditDistance)->Arg(8)->Arg(32)->Arg(128);

static void BM_AlignSentence(benchmark::State& state) {
  MappingTable table = bench_table();
  AlignConfig cfg;
  cfg.mapping = &table;
  const int n = static_cast<int>(state.range(0));
  auto src = random_words(n, 8, false, 3);
  auto tgt = random_words(n + n / 10, 8, true, 4);
  for (auto _ : state) {
    auto trace = align(src, tgt, cfg);
    benchmark::DoNotOptimize(trace.total_cost);
  }
}
BENCHMARK(BM_AlignSentence)->Arg(10)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
