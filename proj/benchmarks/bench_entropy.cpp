#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "adr/entropy.hpp"

namespace {

std::vector<double> random_probs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& x : p) sum += x = draw(rng);
  for (auto& x : p) x /= sum;
  return p;
}

void BM_TokenEntropy(benchmark::State& state) {
  const auto p = random_probs(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(adr::token_entropy(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TokenEntropy)->Arg(20)->Arg(1024)->Arg(50257);

void BM_FromTopLogprobs(benchmark::State& state) {
  const auto p = random_probs(20, 5);
  std::vector<std::pair<std::string, double>> top;
  for (std::size_t i = 0; i < p.size(); ++i) top.emplace_back("t" + std::to_string(i), std::log(p[i] * 0.9));
  for (auto _ : state) benchmark::DoNotOptimize(adr::token_event_from_logprobs("t0", top));
}
BENCHMARK(BM_FromTopLogprobs);

void BM_UnitStats(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> h(0.0, 3.0);
  std::vector<double> e(static_cast<std::size_t>(state.range(0)));
  for (auto& x : e) x = h(rng);
  for (auto _ : state) benchmark::DoNotOptimize(adr::unit_entropy_stats(e, 8, 0, adr::ReasoningMode::Hard));
}
BENCHMARK(BM_UnitStats)->Arg(16)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
