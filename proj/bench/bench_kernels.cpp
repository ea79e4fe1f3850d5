// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "synthetic_corpus.hpp"
#include "testscope/layout/gem.hpp"
#include "testscope/testmodel/test_model.hpp"
#include "testscope/views/views.hpp"

using namespace testscope;

namespace {

const std::vector<SourceFile>& sources(std::size_t classes) {
  static std::map<std::size_t, std::vector<SourceFile>> cache;
  auto it = cache.find(classes);
  if (it == cache.end()) it = cache.emplace(classes, bench::synthetic_sources(classes, 8, 12)).first;
  return it->second;
}

const TestModel& model(std::size_t classes) {
  static std::map<std::size_t, TestModel> cache;
  auto it = cache.find(classes);
  if (it == cache.end()) {
    const auto& files = sources(classes);
    auto result = link_files(parse_sources_serial(files), files, ExtractionConfig{});
    it = cache.emplace(classes, build_test_model(freeze(std::move(result.model)))).first;
  }
  return it->second;
}

std::vector<GraphDocument> detail_views(std::size_t classes) {
  const TestModel& tm = model(classes);
  std::vector<GraphDocument> docs;
  for (auto tc : tm.test_cases()) docs.push_back(build_test_case_view(tm, tc));
  return docs;
}

void BM_ParseSerial(benchmark::State& state) {
  const auto& files = sources(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_sources_serial(files));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(files.size()));
}

void BM_ParseParallel(benchmark::State& state) {
  const auto& files = sources(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_sources(files));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(files.size()));
}

void BM_CoverageSerial(benchmark::State& state) {
  const TestModel& tm = model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(coverage_edges_serial(tm));
}

void BM_CoverageParallel(benchmark::State& state) {
  const TestModel& tm = model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(coverage_edges(tm));
}

void BM_LayoutSerial(benchmark::State& state) {
  auto docs = detail_views(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto copy = docs;
    layout_documents_serial(copy, LayoutOptions{});
    benchmark::DoNotOptimize(copy);
  }
}

void BM_LayoutParallel(benchmark::State& state) {
  auto docs = detail_views(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto copy = docs;
    layout_documents(copy, LayoutOptions{});
    benchmark::DoNotOptimize(copy);
  }
}

}  // namespace

BENCHMARK(BM_ParseSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParseParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LayoutSerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LayoutParallel)->Arg(20)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
