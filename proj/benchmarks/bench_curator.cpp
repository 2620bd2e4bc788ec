#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adr/curator.hpp"

namespace {

const std::filesystem::path kCorpus = std::filesystem::path(ADR_DATA_DIR) / "synthetic_cot_200.jsonl";

std::vector<adr::SourceRecord> load_corpus() {
  std::ifstream in(kCorpus);
  std::vector<adr::SourceRecord> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(adr::source_record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

void BM_Segment(benchmark::State& state) {
  const auto corpus = load_corpus();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(adr::segment_cot(corpus[i++ % corpus.size()].cot));
}
BENCHMARK(BM_Segment);

void BM_CurateRecord(benchmark::State& state) {
  const auto corpus = load_corpus();
  const adr::CuratorConfig cfg;
  const adr::MockRewriter client;
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(adr::curate_record(corpus[i++ % corpus.size()], cfg, client, 1.2));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CurateRecord);

void BM_CurateCorpus(benchmark::State& state) {
  adr::CuratorConfig cfg;
  cfg.jobs = static_cast<std::size_t>(state.range(0));
  const adr::MockRewriter client;
  const auto out = std::filesystem::temp_directory_path() / "adr_bench_curated.jsonl";
  for (auto _ : state) benchmark::DoNotOptimize(adr::curate_corpus(kCorpus, out, cfg, client));
  std::filesystem::remove(out);
  std::filesystem::remove(out.string() + ".manifest.json");
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_CurateCorpus)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
