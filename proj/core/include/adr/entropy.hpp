#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adr/trace_format.hpp"

namespace adr {

// Shannon entropy in nats, 0 ln 0 = 0. Exactly permutation invariant.
// Throws Error(NotADistribution) on negative entries, an empty vector, or a
// sum further than 1e-6 from 1.
double token_entropy(std::span<const double> probs);

// Throws Error(NotADistribution) unless probs is a valid distribution.
void check_distribution(std::span<const double> probs);

struct TokenEvent {
  std::string token_text;
  std::vector<double> probs;
  double entropy_nats = 0.0;
};

TokenEvent make_token_event(std::string token_text, std::vector<double> probs);

// Converts top-k log-probabilities to a renormalized distribution. This
// underestimates the full-vocabulary entropy when the tail is truncated.
TokenEvent token_event_from_logprobs(std::string token_text,
                                     std::span<const std::pair<std::string, double>> top_logprobs);

struct UnitEntropyStats {
  std::size_t unit_index = 0;
  ReasoningMode mode = ReasoningMode::Easy;
  double initial_mean = 0.0;
  double terminal_mean = 0.0;
  std::size_t k = 1;
  std::size_t n_tokens = 0;
};

// Means over the first and last min(k, n) entropies. Throws Error(EmptyUnit).
UnitEntropyStats unit_entropy_stats(std::span<const double> entropies, std::size_t k, std::size_t unit_index,
                                    ReasoningMode mode);
UnitEntropyStats unit_entropy_stats(std::span<const TokenEvent> unit_tokens, std::size_t k,
                                    std::size_t unit_index, ReasoningMode mode);

struct BranchConfig {
  double alpha = 0.5;
  std::size_t k = 8;
  double delta_cap = 0.5;
  // Re-measure H0 at every hard unit instead of only the first.
  bool refresh_h0 = false;

  void validate() const;
};

// clamp((h_current - h0) / max(h0, 1e-6), 0, delta_cap)
double normalized_entropy_delta(double h_current, double h0, const BranchConfig& config);

// alpha + delta_h; delta_h is expected in [0, delta_cap].
double branch_probability(double delta_h, const BranchConfig& config);

struct ModeEntropySummary {
  std::size_t units = 0;
  // Mean of (terminal_mean - initial_mean); empty when no unit of the mode exists.
  std::optional<double> mean_terminal_minus_initial;
};

struct TraceEntropyReport {
  std::vector<UnitEntropyStats> units;
  ModeEntropySummary easy;
  ModeEntropySummary hard;
};

// tokens_per_unit[i] holds the events aligned to trace.units[i]. Throws
// Error(AlignmentMismatch) if the counts differ or any unit has no tokens.
TraceEntropyReport analyze_trace_entropy(const HybridTrace& trace,
                                         std::span<const std::vector<TokenEvent>> tokens_per_unit, std::size_t k);

// Splits a token stream over the units of a parsed trace by byte offset. The
// token texts must concatenate to trace_text exactly; a token belongs to the
// unit whose content span contains its first byte. Tokens that start on tags
// or outside any unit are dropped.
std::vector<std::vector<TokenEvent>> align_tokens_to_units(std::string_view trace_text, const ParseReport& parse,
                                                           std::span<const TokenEvent> tokens);

// Mean of the given entropies; 0 for an empty range.
double mean_entropy(std::span<const double> entropies);

}  // namespace adr
