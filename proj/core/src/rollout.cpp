#include "adr/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "adr/error.hpp"

namespace adr {

ScriptedOracle::ScriptedOracle(std::vector<OracleStep> script) : script_(std::move(script)) {
  if (script_.empty()) throw Error(ErrorCode::InvalidArgument, "scripted oracle needs at least one step");
  for (const auto& s : script_) check_distribution(s.probs);
}

OracleStep ScriptedOracle::step(const GenerationContext& context, CounterRng&) const {
  const auto i = context.generated.size();
  if (i >= script_.size()) return {};
  return script_[i];
}

bool ScriptedOracle::is_terminal(const GenerationContext& context) const {
  return context.generated.size() >= script_.size();
}

std::unique_ptr<ScriptedOracle> scripted_oracle(std::vector<OracleStep> script) {
  return std::make_unique<ScriptedOracle>(std::move(script));
}

std::unique_ptr<ScriptedOracle> load_scripted_oracle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open script " + path.string());
  std::vector<OracleStep> script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      OracleStep step;
      step.token_text = j.at("token").get<std::string>();
      if (j.contains("probs")) {
        step.probs = j.at("probs").get<std::vector<double>>();
      } else {
        std::vector<std::pair<std::string, double>> top;
        for (const auto& e : j.at("top_logprobs")) top.emplace_back(e.at(0).get<std::string>(), e.at(1).get<double>());
        step.probs = token_event_from_logprobs(step.token_text, top).probs;
      }
      script.push_back(std::move(step));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scripted_oracle(std::move(script));
}

std::string_view to_string(Stage stage) { return stage == Stage::Short8k ? "8k" : "16k"; }

std::optional<Stage> parse_stage(std::string_view name) {
  if (name == "8k") return Stage::Short8k;
  if (name == "16k") return Stage::Long16k;
  return std::nullopt;
}

std::size_t stage_budget(Stage stage) { return stage == Stage::Short8k ? 8192 : 16384; }

void RolloutConfig::validate() const {
  branch.validate();
  if (max_branches < 1) throw Error(ErrorCode::InvalidConfig, "max_branches must be >= 1");
  if (jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be >= 1");
}

std::string RolloutNode::text() const {
  std::string out;
  for (const auto& t : tokens) out += t.token_text;
  return out;
}

namespace {

constexpr std::uint64_t kOracleLane = 0;
constexpr std::uint64_t kBranchLane = 1;
constexpr std::size_t kLongestTag = 8;  // "</think>"

// Tag-level view of the decoded text plus the entropy windows the branching
// rule needs. Copied wholesale into a child at a fork.
struct ScanState {
  std::string text;
  std::optional<ReasoningMode> in_unit;
  std::optional<ReasoningMode> last_closed;
  std::deque<double> easy_tail;  // last k entropies of the current or latest easy unit
  std::vector<double> h0_window;
  bool measuring_h0 = false;
  std::optional<double> h0;
  std::optional<double> first_h0;
};

struct TagHit {
  std::size_t pos;
  std::string_view tag;
};

// Tags whose last byte lies in the newly appended region.
std::vector<TagHit> completed_tags(std::string_view text, std::size_t prev_len) {
  std::vector<TagHit> hits;
  const std::size_t from = prev_len > kLongestTag ? prev_len - kLongestTag : 0;
  for (auto tag : tags::kAll) {
    std::size_t pos = text.find(tag, from);
    while (pos != std::string_view::npos) {
      if (pos + tag.size() > prev_len) hits.push_back({pos, tag});
      pos = text.find(tag, pos + 1);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const TagHit& a, const TagHit& b) { return a.pos < b.pos; });
  return hits;
}

struct ForkPoint {
  std::size_t event_index;
  ScanState state;
};

struct NodeJob {
  std::size_t node_id = 0;
  std::optional<std::size_t> parent_id;
  std::size_t fork_offset = 0;
  std::vector<TokenEvent> prefix;
  ScanState state;
};

struct NodeResult {
  RolloutNode node;
  std::vector<BranchEvent> events;
  std::vector<ForkPoint> forks;
  std::optional<double> first_h0;
};

class NodeRunner {
 public:
  NodeRunner(const GeneratorOracle& oracle, std::span<const std::string> prompt, const RolloutConfig& config)
      : oracle_(oracle), prompt_(prompt), config_(config) {}

  NodeResult run(NodeJob job) const {
    NodeResult result;
    auto& node = result.node;
    node.node_id = job.node_id;
    node.parent_id = job.parent_id;
    node.fork_offset = job.fork_offset;
    node.tokens = std::move(job.prefix);

    std::vector<std::string> generated;
    generated.reserve(node.tokens.size());
    for (const auto& t : node.tokens) generated.push_back(t.token_text);

    ScanState state = std::move(job.state);
    CounterRng oracle_rng(config_.seed, job.node_id, kOracleLane);
    CounterRng branch_rng(config_.seed, job.node_id, kBranchLane);

    while (true) {
      if (node.tokens.size() >= config_.max_tokens) {
        node.stop_reason = "budget";
        break;
      }
      const GenerationContext ctx{prompt_, generated};
      OracleStep step;
      TokenEvent event;
      try {
        if (oracle_.is_terminal(ctx)) {
          node.complete = true;
          node.stop_reason = "terminal";
          break;
        }
        step = oracle_.step(ctx, oracle_rng);
        if (step.token_text.empty()) {
          node.complete = true;
          node.stop_reason = "eos";
          break;
        }
        event = make_token_event(step.token_text, std::move(step.probs));
      } catch (const std::exception& e) {
        throw Error(ErrorCode::OracleFailure, "node " + std::to_string(node.node_id) + " at token " +
                                                  std::to_string(node.tokens.size()) + ": " + e.what());
      }
      generated.push_back(event.token_text);
      const double h = event.entropy_nats;
      node.tokens.push_back(std::move(event));
      advance(state, generated.back(), h, node.tokens.size(), node.node_id, branch_rng, result);
    }

    node.trace = parse_trace(node.text());
    result.first_h0 = state.first_h0;
    return result;
  }

 private:
  void set_h0(ScanState& s, double value) const {
    s.h0 = value;
    if (!s.first_h0) s.first_h0 = value;
    s.measuring_h0 = false;
  }

  void advance(ScanState& s, std::string_view token, double entropy, std::size_t offset, std::size_t node_id,
               CounterRng& branch_rng, NodeResult& result) const {
    const std::size_t k = config_.branch.k;
    const std::size_t prev_len = s.text.size();
    s.text += token;
    const auto hits = completed_tags(s.text, prev_len);
    std::optional<std::size_t> fork_event;

    if (hits.empty() && s.in_unit) {
      if (*s.in_unit == ReasoningMode::Easy) {
        s.easy_tail.push_back(entropy);
        if (s.easy_tail.size() > k) s.easy_tail.pop_front();
      } else if (s.measuring_h0) {
        s.h0_window.push_back(entropy);
        if (s.h0_window.size() >= k) set_h0(s, mean_entropy(s.h0_window));
      }
    }

    for (const auto& hit : hits) {
      if (hit.tag == tags::kEasyOpen) {
        s.in_unit = ReasoningMode::Easy;
        s.easy_tail.clear();
      } else if (hit.tag == tags::kEasyClose) {
        s.in_unit.reset();
        s.last_closed = ReasoningMode::Easy;
      } else if (hit.tag == tags::kHardOpen) {
        const bool transition = s.last_closed == ReasoningMode::Easy;
        if (transition && s.h0 && config_.edr_enabled && consider_branch(s, offset, node_id, branch_rng, result)) {
          fork_event = result.events.size() - 1;
        }
        if (!s.first_h0 || config_.branch.refresh_h0) {
          s.measuring_h0 = true;
          s.h0_window.clear();
        }
        s.in_unit = ReasoningMode::Hard;
      } else if (hit.tag == tags::kHardClose) {
        if (s.measuring_h0 && !s.h0_window.empty()) set_h0(s, mean_entropy(s.h0_window));
        s.measuring_h0 = false;
        s.in_unit.reset();
        s.last_closed = ReasoningMode::Hard;
      } else if (hit.tag == tags::kThinkClose) {
        s.in_unit.reset();
        s.measuring_h0 = false;
      }
    }
    // The child resumes from the state after the whole token, `<hard>` included.
    if (fork_event) result.forks.push_back({*fork_event, s});
  }

  bool consider_branch(const ScanState& s, std::size_t offset, std::size_t node_id, CounterRng& branch_rng,
                       NodeResult& result) const {
    const std::vector<double> tail(s.easy_tail.begin(), s.easy_tail.end());
    BranchEvent ev;
    ev.node_id = node_id;
    ev.token_offset = offset;
    ev.h_current = mean_entropy(tail);
    ev.delta_h = normalized_entropy_delta(ev.h_current, *s.h0, config_.branch);
    ev.probability = branch_probability(ev.delta_h, config_.branch);
    ev.decision = branch_rng.bernoulli(ev.probability);
    result.events.push_back(ev);
    return ev.decision;
  }

  const GeneratorOracle& oracle_;
  std::span<const std::string> prompt_;
  const RolloutConfig& config_;
};

std::vector<NodeResult> run_wave(const NodeRunner& runner, std::vector<NodeJob> jobs, std::size_t workers) {
  std::vector<NodeResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  const std::size_t n_threads = std::min(workers, jobs.size());
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = runner.run(std::move(jobs[i]));
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          results[i] = runner.run(std::move(jobs[i]));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace

RolloutTree run_rollout(const GeneratorOracle& oracle, std::span<const std::string> prompt,
                        const RolloutConfig& config) {
  if (config.max_tokens == 0) throw Error(ErrorCode::BudgetZero, "max_tokens is 0");
  if (prompt.empty()) throw Error(ErrorCode::InvalidArgument, "prompt is empty");
  config.validate();

  const NodeRunner runner(oracle, prompt, config);
  RolloutTree tree;
  std::size_t next_id = 1;
  std::vector<NodeJob> wave(1);

  // Waves keep node-id assignment independent of thread scheduling: every
  // node of a wave runs to completion, then forks are granted in
  // (node id, offset) order until max_branches is reached.
  while (!wave.empty()) {
    auto results = run_wave(runner, std::move(wave), config.jobs);
    wave.clear();
    for (auto& r : results) {
      if (r.node.node_id == 0) tree.h0 = r.first_h0;
      for (auto& fork : r.forks) {
        auto& ev = r.events[fork.event_index];
        if (next_id >= config.max_branches) continue;
        ev.child_id = next_id;
        NodeJob job;
        job.node_id = next_id++;
        job.parent_id = r.node.node_id;
        job.fork_offset = ev.token_offset;
        job.prefix.assign(r.node.tokens.begin(), r.node.tokens.begin() + static_cast<std::ptrdiff_t>(ev.token_offset));
        job.state = std::move(fork.state);
        wave.push_back(std::move(job));
      }
      tree.branch_events.insert(tree.branch_events.end(), r.events.begin(), r.events.end());
      tree.nodes.push_back(std::move(r.node));
    }
  }
  std::sort(tree.nodes.begin(), tree.nodes.end(),
            [](const RolloutNode& a, const RolloutNode& b) { return a.node_id < b.node_id; });
  std::stable_sort(tree.branch_events.begin(), tree.branch_events.end(),
                   [](const BranchEvent& a, const BranchEvent& b) {
                     return a.node_id != b.node_id ? a.node_id < b.node_id : a.token_offset < b.token_offset;
                   });
  return tree;
}

std::vector<std::optional<RewardBreakdown>> score_tree(const RolloutTree& tree, std::string_view gold,
                                                       const RewardConfig& config, const TokenCounter& counter) {
  std::vector<GroupSample> group;
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (!tree.nodes[i].complete) continue;
    members.push_back(i);
    group.push_back(make_group_sample(tree.nodes[i].text(), std::string(gold), config, counter));
  }
  std::vector<std::optional<RewardBreakdown>> out(tree.nodes.size());
  for (std::size_t g = 0; g < group.size(); ++g) out[members[g]] = total_reward(g, group, config);
  return out;
}

Selection select_best(const RolloutTree& tree, std::string_view gold, const RewardConfig& config,
                      const TokenCounter& counter) {
  const auto scores = score_tree(tree, gold, config, counter);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (!scores[i]) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& a = *scores[i];
    const auto& b = *scores[*best];
    const auto& na = tree.nodes[i];
    const auto& nb = tree.nodes[*best];
    if (a.total > b.total ||
        (a.total == b.total && (na.tokens.size() < nb.tokens.size() ||
                                (na.tokens.size() == nb.tokens.size() && na.node_id < nb.node_id)))) {
      best = i;
    }
  }
  if (!best) throw Error(ErrorCode::NoCompleteNode, "rollout tree has no complete node");
  return {tree.nodes[*best].node_id, *scores[*best]};
}

}  // namespace adr
