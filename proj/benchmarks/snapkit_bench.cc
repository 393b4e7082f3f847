#include <benchmark/benchmark.h>

#include <sstream>

#include "snapkit/diff_engine.h"
#include "snapkit/ingest.h"
#include "snapkit/kg_categorizer.h"
#include "snapkit/probe_qc.h"
#include "snapkit/textseg.h"
#include "test_support.h"

namespace snapkit {
namespace {

using testing::TextGen;

std::string LongText(std::size_t paragraphs) {
  TextGen gen(1);
  testing::Paras paras;
  for (std::size_t i = 0; i < paragraphs; ++i) paras.push_back(gen.Paragraph(2, 10));
  return gen.RenderNoisy(paras);
}

void BM_Normalize(benchmark::State &state) {
  const std::string text = LongText(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Normalize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Normalize)->Arg(4)->Arg(64);

void BM_Segment(benchmark::State &state) {
  const std::string text = Normalize(LongText(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(Segment("x", text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Segment)->Arg(4)->Arg(64);

void BM_GetDiff(benchmark::State &state) {
  TextGen gen(2);
  testing::Paras prev;
  for (int i = 0; i < state.range(0); ++i) prev.push_back(gen.Paragraph(2, 10));
  const auto recent = gen.Mutate(prev, 4);
  const auto p = Segment("x", Normalize(testing::Render(prev)));
  const auto r = Segment("x", Normalize(testing::Render(recent)));
  for (auto _ : state) benchmark::DoNotOptimize(GetDiff(p, r));
}
BENCHMARK(BM_GetDiff)->Arg(4)->Arg(32)->Arg(256);

void BM_BuildDiffset(benchmark::State &state) {
  TextGen gen(3);
  const auto pair = testing::MakePair(gen, 2000, 600, 100);
  const auto prev = testing::ToSnapshots(pair.prev, "2021-08");
  const auto recent = testing::ToSnapshots(pair.recent, "2021-09");
  DiffOptions opts;
  opts.workers = static_cast<int>(state.range(0));
  std::size_t bytes = 0;
  for (const auto &a : recent) bytes += a.text.size();
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildDiffset(prev, recent, {"2021-08", "2021-09"}, opts));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
}
BENCHMARK(BM_BuildDiffset)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ReadArticleRecords(benchmark::State &state) {
  TextGen gen(4);
  const auto pair = testing::MakePair(gen, 2000, 0, 0);
  std::ostringstream out;
  WriteRecords(testing::ToSnapshots(pair.prev, ""), out);
  const std::string data = out.str();
  for (auto _ : state) {
    std::istringstream in(data);
    benchmark::DoNotOptimize(ReadArticles(in, ArticleFormat::kArticleRecords, "t"));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_ReadArticleRecords)->Unit(benchmark::kMillisecond);

void BM_Categorize(benchmark::State &state) {
  testing::FactGen gen(5, 5000, 40, 8000);
  const auto prev = gen.Facts(static_cast<std::size_t>(state.range(0)));
  const auto recent = gen.Evolve(prev, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(Categorize(prev, recent));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * recent.size()));
}
BENCHMARK(BM_Categorize)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_ContainsText(benchmark::State &state) {
  const std::string text = Normalize(LongText(32));
  const bool fold = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(ContainsText(text, "zzzz qqqq", fold));
}
BENCHMARK(BM_ContainsText)->Arg(0)->Arg(1);

void BM_FilterFrequency(benchmark::State &state) {
  TextGen gen(6);
  std::vector<ProbeInstance> v;
  for (int i = 0; i < state.range(0); ++i) {
    v.push_back(testing::MakeProbe("s" + std::to_string(gen.Uniform(0, 500)),
                                   "r" + std::to_string(gen.Uniform(0, 30)),
                                   "o" + std::to_string(gen.Uniform(0, 2000))));
  }
  for (auto _ : state) benchmark::DoNotOptimize(FilterFrequency(v));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * v.size()));
}
BENCHMARK(BM_FilterFrequency)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace snapkit

BENCHMARK_MAIN();
