// Serial vs OpenMP corpus kernels. Arg(0) runs the serial reference.

#include <benchmark/benchmark.h>

#include "mask/keywords.hpp"
#include "mask/metrics.hpp"
#include "mask/parallel.hpp"
#include "mask/sanitizer.hpp"
#include "synthetic.hpp"

using namespace mask;

namespace {

const Corpus& corpus() {
  static const Corpus c = testing::CorpusGenerator(2024).corpus(400);
  return c;
}

const std::vector<std::string>& raw_texts() {
  static const std::vector<std::string> texts = [] {
    std::vector<std::string> out;
    for (const auto& t : corpus().transcripts) out.push_back(join_transcript(t));
    return out;
  }();
  return texts;
}

void BM_SanitizeMask(benchmark::State& state) {
  const auto s = SanitizerRegistry::with_builtins().lookup("pii_mask", {});
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto out = jobs == 0 ? kernels::sanitize_corpus_serial(*s, corpus())
                         : kernels::sanitize_corpus(*s, corpus(), jobs);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

void BM_CountPii(benchmark::State& state) {
  const auto& detector = *PiiDetector::defaults();
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto out = jobs == 0 ? kernels::count_pii_serial(detector, raw_texts())
                         : kernels::count_pii(detector, raw_texts(), jobs);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(raw_texts().size()));
}

void BM_LexicalSimilarity(benchmark::State& state) {
  static const std::vector<std::string> masked = [] {
    std::vector<std::string> out;
    for (const auto& t : raw_texts()) out.push_back(PiiDetector::defaults()->mask(t));
    return out;
  }();
  const LexicalCosine cos;
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto out = jobs == 0 ? kernels::similarities_serial(cos, raw_texts(), masked)
                         : kernels::similarities(cos, raw_texts(), masked, jobs);
    benchmark::DoNotOptimize(out);
  }
}

void BM_FitKeywords(benchmark::State& state) {
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto fit = fit_keywords(corpus(), kDefaultTopN, {}, {}, jobs == 0 ? 1 : jobs);
    benchmark::DoNotOptimize(fit);
  }
}

}  // namespace

BENCHMARK(BM_SanitizeMask)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CountPii)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LexicalSimilarity)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitKeywords)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
