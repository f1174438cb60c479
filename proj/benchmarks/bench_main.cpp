#include <benchmark/benchmark.h>

#include "cfprm/bon.hpp"
#include "cfprm/features.hpp"
#include "cfprm/merge.hpp"
#include "cfprm/scorer.hpp"
#include "cfprm/synth.hpp"
#include "cfprm/trainer.hpp"

namespace {

using namespace cfprm;

SynthConfig small_config(std::size_t n_queries, std::size_t n_eval) {
  SynthConfig cfg;
  cfg.n_queries = n_queries;
  cfg.n_eval_queries = n_eval;
  cfg.seed = 7;
  return cfg;
}

void BM_Featurize(benchmark::State& state) {
  const auto set = gen_training_set(small_config(1, 1));
  const auto& t = set.front();
  std::string prefix;
  for (const auto& s : t.steps) prefix += s.text + ' ';
  for (auto _ : state) benchmark::DoNotOptimize(featurize(t.query, prefix));
}
BENCHMARK(BM_Featurize);

void BM_BuildCorpus(benchmark::State& state) {
  const auto set = gen_training_set(small_config(500, 1));
  const MergeConfig cfg{static_cast<std::size_t>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(build_granular_corpus(set, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size()));
}
BENCHMARK(BM_BuildCorpus)->Arg(1)->Arg(2)->Arg(4);

void BM_BatchObjective(benchmark::State& state) {
  const auto loss = static_cast<LossKind>(state.range(0));
  const auto arch = state.range(1) == 0 ? Arch::kLinear : Arch::kMlp1;
  const auto set = gen_training_set(small_config(64, 1));
  const auto corpus = build_granular_corpus(set, MergeConfig{1, 1});
  auto units = make_units(corpus.buckets.at(1), loss, kDefaultFeatureDim);
  units.resize(std::min<std::size_t>(units.size(), 32));
  const auto params = ScorerParams::initial(arch, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(batch_objective(params, units, loss, QRankingConfig{}));
}
BENCHMARK(BM_BatchObjective)
    ->ArgsProduct({{static_cast<std::int64_t>(LossKind::kBce),
                    static_cast<std::int64_t>(LossKind::kMse),
                    static_cast<std::int64_t>(LossKind::kQRanking)},
                   {0, 1}});

void BM_TrainCurriculum(benchmark::State& state) {
  const auto set = gen_training_set(small_config(200, 1));
  const auto corpus = build_granular_corpus(set, MergeConfig{4, 1});
  TrainConfig cfg;
  const auto init = ScorerParams::initial(Arch::kLinear, 0);
  for (auto _ : state) benchmark::DoNotOptimize(train(corpus, cfg, init));
}
BENCHMARK(BM_TrainCurriculum)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const auto pools = gen_eval_pools(small_config(1, 50));
  const auto params = ScorerParams::initial(Arch::kMlp1, 3);
  BonOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(pools, params, opts));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
