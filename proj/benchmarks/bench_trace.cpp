#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "adr/reward.hpp"
#include "adr/trace_format.hpp"

namespace {

std::string make_text(std::size_t units, std::size_t words) {
  std::vector<std::pair<adr::ReasoningMode, std::string>> parts;
  for (std::size_t u = 0; u < units; ++u) {
    const bool hard = u % 3 == 2;
    std::string body = hard ? "Wait," : "so";
    for (std::size_t w = 1; w < words; ++w) body += " step" + std::to_string(w);
    parts.emplace_back(hard ? adr::ReasoningMode::Hard : adr::ReasoningMode::Easy, body);
  }
  return adr::render_trace(adr::make_trace(std::move(parts), "\\boxed{42}"));
}

void BM_ParseTrace(benchmark::State& state) {
  const auto text = make_text(static_cast<std::size_t>(state.range(0)), 40);
  for (auto _ : state) benchmark::DoNotOptimize(adr::parse_trace(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseTrace)->Arg(4)->Arg(32)->Arg(256);

void BM_ParseMalformed(benchmark::State& state) {
  std::mt19937_64 rng(11);
  auto text = make_text(32, 40);
  std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
  for (int i = 0; i < 20; ++i) text[pos(rng)] = "<>/ "[i % 4];
  for (auto _ : state) benchmark::DoNotOptimize(adr::parse_trace(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseMalformed);

void BM_ScoreGroup(benchmark::State& state) {
  const adr::RewardConfig cfg;
  std::vector<adr::GroupSample> group;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    group.push_back(adr::make_group_sample(make_text(8 + static_cast<std::size_t>(i % 5), 30),
                                           i % 2 ? "42" : "41", cfg));
  }
  for (auto _ : state) benchmark::DoNotOptimize(adr::score_group(group, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreGroup)->Arg(8)->Arg(64);

void BM_MakeGroupSample(benchmark::State& state) {
  const adr::RewardConfig cfg;
  const auto text = make_text(16, 40);
  for (auto _ : state) benchmark::DoNotOptimize(adr::make_group_sample(text, "42", cfg));
}
BENCHMARK(BM_MakeGroupSample);

}  // namespace

BENCHMARK_MAIN();
