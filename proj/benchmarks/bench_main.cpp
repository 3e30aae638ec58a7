#include <benchmark/benchmark.h>

#include <vector>

#include "motiondex/align.hpp"
#include "motiondex/codebook.hpp"
#include "motiondex/engine.hpp"
#include "motiondex/featurize.hpp"
#include "motiondex/index.hpp"
#include "motiondex/random.hpp"
#include "motiondex/synth.hpp"

namespace {

using namespace motiondex;

std::vector<Word> random_words(Rng& rng, std::size_t len, std::size_t vocab) {
  std::vector<Word> w(len);
  for (auto& x : w) x = static_cast<Word>(rng.uniform_index(vocab));
  return w;
}

std::vector<TokenSequence> random_corpus(std::size_t n, std::size_t vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenSequence> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = "s" + std::to_string(i);
    out[i].words = random_words(rng, 20 + rng.uniform_index(41), vocab);
  }
  return out;
}

template <MetricScore (*Fn)(WordSpan, WordSpan, const AlignParams&)>
void BM_Metric(benchmark::State& state) {
  Rng rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = random_words(rng, len, 64), b = random_words(rng, len, 64);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b, {}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Metric<twed>)->Name("twed")->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_Metric<lcss>)->Name("lcss")->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_Metric<edr>)->Name("edr")->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_Metric<erp>)->Name("erp")->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNSquared);

void BM_Dtw(benchmark::State& state) {
  Rng rng(2);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = random_words(rng, len, 64), b = random_words(rng, len, 64);
  for (auto _ : state) benchmark::DoNotOptimize(dtw(a, b));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(2)->Range(16, 256);

void BM_Shortlist(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MotionIndex idx = build_index(random_corpus(n, kDefaultVocabulary, 3), kDefaultVocabulary);
  Rng rng(4);
  const Histogram q = build_histogram(random_words(rng, 40, kDefaultVocabulary), kDefaultVocabulary);
  for (auto _ : state) benchmark::DoNotOptimize(shortlist(q, idx));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Shortlist)->RangeMultiplier(10)->Range(1000, 100000)->Complexity(benchmark::oN);

void BM_Query(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto corpus = random_corpus(n, kDefaultVocabulary, 5);
  const MotionIndex idx = build_index(corpus, kDefaultVocabulary);
  EngineConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(query(corpus.front(), idx, cfg, 10));
}
BENCHMARK(BM_Query)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Quantize(benchmark::State& state) {
  const auto patches = gen_gaussian_patches({.n_clusters = 128, .per_cluster = 4, .dim = 16, .seed = 6});
  const Codebook cb = init_codebook(patches, static_cast<std::size_t>(state.range(0)), kDefaultAlpha, 7, {});
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(quantize(patches[i++ % patches.size()].values, cb));
}
BENCHMARK(BM_Quantize)->Arg(64)->Arg(512);

void BM_Featurize(benchmark::State& state) {
  const auto poses = gen_synth_poses({.n_classes = 1, .per_class = 1, .num_frames = 256, .seed = 8});
  for (auto _ : state) benchmark::DoNotOptimize(featurize_sequence(poses.front(), {}));
}
BENCHMARK(BM_Featurize);

}  // namespace

BENCHMARK_MAIN();
