#include "adr/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adr/error.hpp"

namespace adr {

void check_distribution(std::span<const double> probs) {
  if (probs.empty()) throw Error(ErrorCode::NotADistribution, "empty probability vector");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorCode::NotADistribution, "negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::NotADistribution, "probabilities sum to " + std::to_string(sum));
  }
}

double token_entropy(std::span<const double> probs) {
  check_distribution(probs);
  // Sorting first fixes the summation order, so any permutation of the same
  // values yields a bit-identical result.
  std::vector<double> sorted(probs.begin(), probs.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  double comp = 0.0;
  for (double p : sorted) {
    if (p <= 0.0) continue;
    const double term = -p * std::log(p) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return std::max(sum, 0.0);
}

TokenEvent make_token_event(std::string token_text, std::vector<double> probs) {
  TokenEvent ev;
  ev.entropy_nats = token_entropy(probs);
  ev.token_text = std::move(token_text);
  ev.probs = std::move(probs);
  return ev;
}

TokenEvent token_event_from_logprobs(std::string token_text,
                                     std::span<const std::pair<std::string, double>> top_logprobs) {
  if (top_logprobs.empty()) throw Error(ErrorCode::NotADistribution, "no top logprobs for token");
  double max_lp = -INFINITY;
  for (const auto& [_, lp] : top_logprobs) max_lp = std::max(max_lp, lp);
  if (!std::isfinite(max_lp)) throw Error(ErrorCode::NotADistribution, "non-finite logprobs");
  std::vector<double> probs;
  probs.reserve(top_logprobs.size());
  double z = 0.0;
  for (const auto& [_, lp] : top_logprobs) {
    const double w = std::exp(lp - max_lp);
    probs.push_back(w);
    z += w;
  }
  for (auto& p : probs) p /= z;
  return make_token_event(std::move(token_text), std::move(probs));
}

double mean_entropy(std::span<const double> entropies) {
  if (entropies.empty()) return 0.0;
  return std::accumulate(entropies.begin(), entropies.end(), 0.0) / static_cast<double>(entropies.size());
}

UnitEntropyStats unit_entropy_stats(std::span<const double> entropies, std::size_t k, std::size_t unit_index,
                                    ReasoningMode mode) {
  if (entropies.empty()) throw Error(ErrorCode::EmptyUnit, "unit " + std::to_string(unit_index) + " has no tokens");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "entropy window k must be >= 1");
  const std::size_t w = std::min(k, entropies.size());
  UnitEntropyStats s;
  s.unit_index = unit_index;
  s.mode = mode;
  s.k = k;
  s.n_tokens = entropies.size();
  s.initial_mean = mean_entropy(entropies.first(w));
  s.terminal_mean = mean_entropy(entropies.last(w));
  return s;
}

UnitEntropyStats unit_entropy_stats(std::span<const TokenEvent> unit_tokens, std::size_t k, std::size_t unit_index,
                                    ReasoningMode mode) {
  std::vector<double> h(unit_tokens.size());
  std::transform(unit_tokens.begin(), unit_tokens.end(), h.begin(), [](const TokenEvent& e) { return e.entropy_nats; });
  return unit_entropy_stats(h, k, unit_index, mode);
}

void BranchConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in [0, 1]");
  if (!(delta_cap >= 0.0 && delta_cap <= 1.0 - alpha + 1e-12)) {
    throw Error(ErrorCode::InvalidConfig, "delta_cap must lie in [0, 1 - alpha]");
  }
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
}

double normalized_entropy_delta(double h_current, double h0, const BranchConfig& config) {
  constexpr double kEps = 1e-6;
  const double rel = (h_current - h0) / std::max(h0, kEps);
  return std::clamp(rel, 0.0, config.delta_cap);
}

double branch_probability(double delta_h, const BranchConfig& config) { return config.alpha + delta_h; }

TraceEntropyReport analyze_trace_entropy(const HybridTrace& trace,
                                         std::span<const std::vector<TokenEvent>> tokens_per_unit, std::size_t k) {
  if (tokens_per_unit.size() != trace.units.size()) {
    throw Error(ErrorCode::AlignmentMismatch, "token spans cover " + std::to_string(tokens_per_unit.size()) +
                                                  " units but trace has " + std::to_string(trace.units.size()));
  }
  TraceEntropyReport report;
  double easy_sum = 0.0;
  double hard_sum = 0.0;
  for (std::size_t i = 0; i < trace.units.size(); ++i) {
    if (tokens_per_unit[i].empty()) {
      throw Error(ErrorCode::AlignmentMismatch, "no tokens aligned to unit " + std::to_string(i));
    }
    const auto& u = trace.units[i];
    auto stats = unit_entropy_stats(std::span<const TokenEvent>(tokens_per_unit[i]), k, i, u.mode);
    const double delta = stats.terminal_mean - stats.initial_mean;
    if (u.mode == ReasoningMode::Easy) {
      ++report.easy.units;
      easy_sum += delta;
    } else {
      ++report.hard.units;
      hard_sum += delta;
    }
    report.units.push_back(stats);
  }
  if (report.easy.units > 0) report.easy.mean_terminal_minus_initial = easy_sum / static_cast<double>(report.easy.units);
  if (report.hard.units > 0) report.hard.mean_terminal_minus_initial = hard_sum / static_cast<double>(report.hard.units);
  return report;
}

std::vector<std::vector<TokenEvent>> align_tokens_to_units(std::string_view trace_text, const ParseReport& parse,
                                                           std::span<const TokenEvent> tokens) {
  if (!parse.ok) throw Error(ErrorCode::AlignmentMismatch, "trace does not parse");
  std::string joined;
  for (const auto& t : tokens) joined += t.token_text;
  if (joined != trace_text) {
    throw Error(ErrorCode::AlignmentMismatch, "token texts do not concatenate to the trace text");
  }
  std::vector<std::vector<TokenEvent>> out(parse.unit_spans.size());
  std::size_t offset = 0;
  std::size_t unit = 0;
  for (const auto& t : tokens) {
    // Position a token by its first visible byte so " </easy>" stays outside the unit.
    std::size_t lead = 0;
    while (lead < t.token_text.size() && is_space(t.token_text[lead])) ++lead;
    const std::size_t at = lead < t.token_text.size() ? offset + lead : offset;
    while (unit < parse.unit_spans.size() && at >= parse.unit_spans[unit].end) ++unit;
    if (unit < parse.unit_spans.size() && at >= parse.unit_spans[unit].begin) out[unit].push_back(t);
    offset += t.token_text.size();
  }
  return out;
}

}  // namespace adr
