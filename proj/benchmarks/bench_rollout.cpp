#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "adr/rollout.hpp"

namespace {

std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

// Alternating hard/easy units; easy units are wider than the first hard unit
// so every transition is a fork candidate.
std::vector<adr::OracleStep> script(std::size_t units, std::size_t words) {
  std::vector<adr::OracleStep> s;
  auto push = [&](std::string t, std::vector<double> p) { s.push_back({std::move(t), std::move(p)}); };
  push("<think>", {1.0});
  for (std::size_t u = 0; u < units; ++u) {
    const bool hard = u % 2 == 0;
    push(hard ? " <hard>" : " <easy>", {1.0});
    for (std::size_t w = 0; w < words; ++w) {
      push(w == 0 && hard ? " Wait," : " w" + std::to_string(w), hard ? uniform(2) : uniform(4));
    }
    push(hard ? " </hard>" : " </easy>", {1.0});
  }
  push(" </think>", {1.0});
  push(" 42", {1.0});
  return s;
}

void BM_Rollout(benchmark::State& state) {
  const adr::ScriptedOracle oracle(script(static_cast<std::size_t>(state.range(0)), 32));
  const std::vector<std::string> prompt{"<problem>"};
  adr::RolloutConfig cfg;
  cfg.max_branches = static_cast<std::size_t>(state.range(1));
  cfg.jobs = static_cast<std::size_t>(state.range(2));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(adr::run_rollout(oracle, prompt, cfg));
  }
}
BENCHMARK(BM_Rollout)
    ->Args({8, 1, 1})
    ->Args({8, 4, 1})
    ->Args({64, 4, 1})
    ->Args({64, 16, 1})
    ->Args({64, 16, 4})
    ->Unit(benchmark::kMicrosecond);

void BM_SelectBest(benchmark::State& state) {
  const adr::ScriptedOracle oracle(script(16, 32));
  const std::vector<std::string> prompt{"<problem>"};
  adr::RolloutConfig cfg;
  cfg.max_branches = 8;
  const auto tree = adr::run_rollout(oracle, prompt, cfg);
  const adr::RewardConfig rc;
  for (auto _ : state) benchmark::DoNotOptimize(adr::select_best(tree, "42", rc));
}
BENCHMARK(BM_SelectBest)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
