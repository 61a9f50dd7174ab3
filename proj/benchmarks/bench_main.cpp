#include <benchmark/benchmark.h>

#include <map>

#include "semantify/evaluation.hpp"
#include "semantify/pairgen.hpp"
#include "semantify/scoring.hpp"
#include "semantify/synthetic.hpp"

namespace {

using namespace semantify;

const Corpus& corpus_of(std::size_t assays) {
  static std::map<std::size_t, Corpus> cache;
  auto it = cache.find(assays);
  if (it == cache.end()) {
    SyntheticCorpusSpec spec;
    spec.assays = assays;
    spec.predicates = 24;
    spec.objects_per_predicate = 40;
    it = cache.emplace(assays, make_synthetic_corpus(spec)).first;
  }
  return it->second;
}

void BM_BuildTrainingSet(benchmark::State& state) {
  const auto& c = corpus_of(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_training_set(c, {170, ++seed}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}
BENCHMARK(BM_BuildTrainingSet)->Arg(100)->Arg(983);

void BM_FrequencyRankFullVocabulary(benchmark::State& state) {
  const auto& c = corpus_of(983);
  FrequencyModel m;
  m.train({c, {}, {}});
  const auto vocab = c.vocabulary().statements();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_statements(m, c[0].assay, vocab));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(vocab.size()));
}
BENCHMARK(BM_FrequencyRankFullVocabulary);

void BM_LexicalScoreBatch(benchmark::State& state) {
  const auto& c = corpus_of(300);
  const auto pairs = build_training_set(c, {30, 1});
  LexicalModel m({2, 0.05, 1e-4, 1});
  m.train({c, pairs, {30, 1}});
  const auto vocab = c.vocabulary().statements();
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.score_batch(c[1].assay, vocab));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(vocab.size()));
}
BENCHMARK(BM_LexicalScoreBatch);

void BM_HitAndMissAll(benchmark::State& state) {
  const auto& c = corpus_of(static_cast<std::size_t>(state.range(0)));
  FrequencyModel m;
  m.train({c, {}, {}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(hit_and_miss_all(m, c, false));
  }
}
BENCHMARK(BM_HitAndMissAll)->Arg(100)->Arg(983);

void BM_EvaluateFullVocabulary(benchmark::State& state) {
  const auto& c = corpus_of(983);
  const auto folds = materialize_folds(c, split_folds(c, 3, 1));
  FrequencyModel m;
  m.train({folds[0].train, {}, {}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evaluate_pairs(m, folds[0].test, EvaluationMode::full_vocabulary, {}, 0.5));
  }
}
BENCHMARK(BM_EvaluateFullVocabulary);

}  // namespace
BENCHMARK_MAIN();
