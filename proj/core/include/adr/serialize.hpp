#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "adr/entropy.hpp"
#include "adr/reward.hpp"
#include "adr/rollout.hpp"
#include "adr/trace_format.hpp"

namespace adr {

nlohmann::json to_json(const ParseReport& report);
nlohmann::json to_json(const RewardBreakdown& reward);
nlohmann::json to_json(const UnitEntropyStats& stats);
nlohmann::json to_json(const TraceEntropyReport& report);

// Tree dump: nodes with decoded text and per-token entropies, branch events,
// H0, and per-node rewards when supplied (indexed like tree.nodes).
nlohmann::json to_json(const RolloutTree& tree,
                       const std::vector<std::optional<RewardBreakdown>>& rewards = {});

// One entropy-ingestion line: {"token": str, "top_logprobs": [[tok, lp], ..]}.
// {"probs": [..]} and {"entropy": x} are accepted as well; the latter yields
// an event with an empty probability vector.
TokenEvent token_event_from_json(const nlohmann::json& j);

}  // namespace adr
