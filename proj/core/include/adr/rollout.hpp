#pragma once

// Entropy-guided dynamic rollout.
//
// Generation runs token by token against a GeneratorOracle. At an easy->hard
// transition (a `</easy>` followed by `<hard>`), the engine draws a Bernoulli
// with probability SP = alpha + dH, where dH compares the mean entropy of the
// last k tokens of the closing easy unit with H0, the mean entropy of the
// first k tokens of the first hard unit. A success forks a child that shares
// the prefix up to and including the `<hard>` tag.
//
// The transition that opens the first hard unit defines H0 and never branches.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adr/entropy.hpp"
#include "adr/reward.hpp"
#include "adr/rng.hpp"
#include "adr/trace_format.hpp"

namespace adr {

struct OracleStep {
  std::string token_text;  // empty signals end of sequence
  std::vector<double> probs;
};

struct GenerationContext {
  std::span<const std::string> prompt;
  std::span<const std::string> generated;
};

// Stands in for the policy model. Implementations must be deterministic in
// (context, rng state) and safe to call concurrently.
class GeneratorOracle {
 public:
  virtual ~GeneratorOracle() = default;
  virtual OracleStep step(const GenerationContext& context, CounterRng& rng) const = 0;
  virtual bool is_terminal(const GenerationContext& context) const = 0;
};

// Replays a fixed script, indexed by the number of generated tokens.
class ScriptedOracle final : public GeneratorOracle {
 public:
  // Throws Error(InvalidArgument) on an empty script and
  // Error(NotADistribution) on an invalid probability row.
  explicit ScriptedOracle(std::vector<OracleStep> script);

  OracleStep step(const GenerationContext& context, CounterRng& rng) const override;
  bool is_terminal(const GenerationContext& context) const override;

  std::size_t size() const { return script_.size(); }

 private:
  std::vector<OracleStep> script_;
};

std::unique_ptr<ScriptedOracle> scripted_oracle(std::vector<OracleStep> script);

// JSONL, one token per line: {"token": str, "probs": [..]} or
// {"token": str, "top_logprobs": [[tok, logprob], ..]}.
std::unique_ptr<ScriptedOracle> load_scripted_oracle(const std::filesystem::path& path);

enum class Stage { Short8k, Long16k };

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);
std::size_t stage_budget(Stage stage);

struct RolloutConfig {
  BranchConfig branch;
  std::size_t max_tokens = 16384;
  std::size_t max_branches = 4;
  bool edr_enabled = true;
  std::uint64_t seed = 0;
  // Worker threads for live branches. Never changes the result.
  std::size_t jobs = 1;

  void validate() const;
};

struct BranchEvent {
  std::size_t node_id = 0;
  std::size_t token_offset = 0;
  double h_current = 0.0;
  double delta_h = 0.0;
  double probability = 0.0;
  bool decision = false;
  // Set when the draw succeeded and branch capacity remained.
  std::optional<std::size_t> child_id;
};

struct RolloutNode {
  std::size_t node_id = 0;
  std::optional<std::size_t> parent_id;
  std::size_t fork_offset = 0;
  std::vector<TokenEvent> tokens;
  bool complete = false;
  std::string stop_reason;
  std::optional<ParseReport> trace;

  std::string text() const;
};

struct RolloutTree {
  std::vector<RolloutNode> nodes;
  std::optional<double> h0;
  std::vector<BranchEvent> branch_events;
};

// Throws Error(BudgetZero) when max_tokens is 0 and Error(OracleFailure)
// when the oracle throws or returns an invalid distribution.
RolloutTree run_rollout(const GeneratorOracle& oracle, std::span<const std::string> prompt,
                        const RolloutConfig& config);

struct Selection {
  std::size_t node_id = 0;
  RewardBreakdown reward;
};

// Scores every complete node as a member of one group and returns the best
// total; ties go to fewer tokens, then the lower node id.
// Throws Error(NoCompleteNode).
Selection select_best(const RolloutTree& tree, std::string_view gold, const RewardConfig& config,
                      const TokenCounter& counter = default_token_counter());

// Rewards for every complete node, indexed like tree.nodes (empty for
// incomplete nodes).
std::vector<std::optional<RewardBreakdown>> score_tree(const RolloutTree& tree, std::string_view gold,
                                                       const RewardConfig& config,
                                                       const TokenCounter& counter = default_token_counter());

}  // namespace adr
