#include <gtest/gtest.h>

#include "adr/error.hpp"
#include "adr/rollout.hpp"
#include "adr/serialize.hpp"
#include "support/oracles.hpp"

namespace adr {
namespace {

using testing::ScriptBuilder;
using testing::transition_script;
using testing::uniform_probs;

const std::vector<std::string> kPrompt{"Solve: 6 * 7."};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

std::string dump(const RolloutTree& tree) { return to_json(tree).dump(); }

TEST(ScriptedOracle, ReplaysThenTerminates) {
  const ScriptedOracle oracle(ScriptBuilder{}.token("a").token("b").token("c").build());
  CounterRng rng;
  std::vector<std::string> gen;
  for (const char* want : {"a", "b", "c"}) {
    const GenerationContext ctx{kPrompt, gen};
    ASSERT_FALSE(oracle.is_terminal(ctx));
    const auto s = oracle.step(ctx, rng);
    EXPECT_EQ(s.token_text, want);
    gen.push_back(s.token_text);
  }
  EXPECT_TRUE(oracle.is_terminal({kPrompt, gen}));
}

TEST(ScriptedOracle, RejectsBadScripts) {
  EXPECT_EQ(code_of([] { ScriptedOracle({}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { ScriptedOracle(ScriptBuilder{}.token("a", {0.5, 0.2}).build()); }),
            ErrorCode::NotADistribution);
}

TEST(Rollout, SingleUnitWithoutEdr) {
  const ScriptedOracle oracle(
      ScriptBuilder{}.token("<think>").unit(ReasoningMode::Easy, 3, uniform_probs(3)).token(" </think>").token(" 4").build());
  RolloutConfig cfg;
  cfg.edr_enabled = false;
  const auto tree = run_rollout(oracle, kPrompt, cfg);
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_TRUE(tree.branch_events.empty());
  EXPECT_TRUE(tree.nodes[0].complete);
  EXPECT_EQ(tree.nodes[0].stop_reason, "terminal");
  ASSERT_TRUE(tree.nodes[0].trace.has_value());
  EXPECT_TRUE(tree.nodes[0].trace->ok);
}

TEST(Rollout, CappedDeltaForksOnce) {
  const ScriptedOracle oracle(transition_script(1, 4));
  RolloutConfig cfg;
  cfg.max_branches = 2;
  const auto tree = run_rollout(oracle, kPrompt, cfg);
  ASSERT_EQ(tree.nodes.size(), 2u);
  ASSERT_EQ(tree.branch_events.size(), 1u);
  const auto& ev = tree.branch_events[0];
  EXPECT_TRUE(ev.decision);
  EXPECT_EQ(ev.probability, 1.0);
  EXPECT_EQ(ev.delta_h, 0.5);
  EXPECT_EQ(ev.child_id, std::optional<std::size_t>(1));
  ASSERT_TRUE(tree.h0.has_value());
  EXPECT_NEAR(*tree.h0, std::log(2.0), 1e-12);

  const auto& child = tree.nodes[1];
  EXPECT_EQ(child.parent_id, std::optional<std::size_t>(0));
  EXPECT_EQ(child.fork_offset, ev.token_offset);
  EXPECT_EQ(child.tokens[child.fork_offset - 1].token_text, " <hard>");
}

TEST(Rollout, NoBranchAtDefiningTransition) {
  const ScriptedOracle oracle(ScriptBuilder{}
                                  .token("<think>")
                                  .unit(ReasoningMode::Easy, 8, uniform_probs(16))
                                  .unit(ReasoningMode::Hard, 8, uniform_probs(2))
                                  .token(" </think>")
                                  .token(" 1")
                                  .build());
  const auto tree = run_rollout(oracle, kPrompt, RolloutConfig{});
  EXPECT_EQ(tree.nodes.size(), 1u);
  EXPECT_TRUE(tree.branch_events.empty());
  EXPECT_TRUE(tree.h0.has_value());
}

TEST(Rollout, ZeroDeltaIsDeterministic) {
  const ScriptedOracle oracle(transition_script(6, 2));
  RolloutConfig cfg;
  cfg.seed = 1234;
  const auto first = dump(run_rollout(oracle, kPrompt, cfg));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(dump(run_rollout(oracle, kPrompt, cfg)), first);
  for (std::size_t jobs : {2u, 4u, 8u}) {
    cfg.jobs = jobs;
    EXPECT_EQ(dump(run_rollout(oracle, kPrompt, cfg)), first);
  }
}

TEST(Rollout, MaxBranchesBoundsTree) {
  const ScriptedOracle oracle(transition_script(10, 4));
  RolloutConfig cfg;
  cfg.max_branches = 4;
  const auto tree = run_rollout(oracle, kPrompt, cfg);
  EXPECT_EQ(tree.nodes.size(), 4u);
  std::size_t granted = 0;
  for (const auto& ev : tree.branch_events) {
    EXPECT_TRUE(ev.decision);
    granted += ev.child_id.has_value();
  }
  EXPECT_EQ(granted, 3u);
}

TEST(Rollout, BudgetStopsGeneration) {
  const ScriptedOracle oracle(transition_script(3, 2));
  RolloutConfig cfg;
  cfg.max_tokens = 5;
  const auto tree = run_rollout(oracle, kPrompt, cfg);
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_EQ(tree.nodes[0].tokens.size(), 5u);
  EXPECT_FALSE(tree.nodes[0].complete);
  EXPECT_EQ(tree.nodes[0].stop_reason, "budget");
}

TEST(Rollout, Errors) {
  const ScriptedOracle oracle(transition_script(1, 2));
  RolloutConfig cfg;
  cfg.max_tokens = 0;
  EXPECT_EQ(code_of([&] { run_rollout(oracle, kPrompt, cfg); }), ErrorCode::BudgetZero);
  EXPECT_EQ(code_of([&] { run_rollout(oracle, {}, RolloutConfig{}); }), ErrorCode::InvalidArgument);

  class Broken final : public GeneratorOracle {
   public:
    OracleStep step(const GenerationContext& ctx, CounterRng&) const override {
      if (ctx.generated.size() == 2) throw std::runtime_error("backend down");
      return {"x", {1.0}};
    }
    bool is_terminal(const GenerationContext&) const override { return false; }
  };
  EXPECT_EQ(code_of([&] { run_rollout(Broken{}, kPrompt, RolloutConfig{}); }), ErrorCode::OracleFailure);

  class BadProbs final : public GeneratorOracle {
   public:
    OracleStep step(const GenerationContext&, CounterRng&) const override { return {"x", {0.2}}; }
    bool is_terminal(const GenerationContext&) const override { return false; }
  };
  EXPECT_EQ(code_of([&] { run_rollout(BadProbs{}, kPrompt, RolloutConfig{}); }), ErrorCode::OracleFailure);
}

TEST(RolloutProperties, RandomOracleInvariants) {
  const testing::RandomTraceOracle oracle;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RolloutConfig cfg;
    cfg.seed = seed;
    cfg.branch.k = 2;
    cfg.max_tokens = 40 + seed % 60;
    cfg.max_branches = 1 + seed % 5;
    const auto tree = run_rollout(oracle, kPrompt, cfg);
    ASSERT_GE(tree.nodes.size(), 1u);
    EXPECT_LE(tree.nodes.size(), cfg.max_branches);
    EXPECT_FALSE(tree.nodes[0].parent_id.has_value());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& n = tree.nodes[i];
      EXPECT_EQ(n.node_id, i);
      EXPECT_LE(n.tokens.size(), cfg.max_tokens);
      if (!n.parent_id) continue;
      const auto& parent = tree.nodes[*n.parent_id];
      ASSERT_LE(n.fork_offset, parent.tokens.size());
      for (std::size_t t = 0; t < n.fork_offset; ++t) {
        ASSERT_EQ(n.tokens[t].token_text, parent.tokens[t].token_text);
      }
      EXPECT_EQ(n.tokens[n.fork_offset - 1].token_text, " <hard>");
    }
    for (const auto& ev : tree.branch_events) {
      EXPECT_GE(ev.probability, cfg.branch.alpha);
      EXPECT_LE(ev.probability, 1.0);
      if (ev.child_id) {
        EXPECT_TRUE(ev.decision);
      }
    }
    cfg.jobs = 4;
    EXPECT_EQ(dump(run_rollout(oracle, kPrompt, cfg)), dump(tree));
    cfg.edr_enabled = false;
    const auto flat = run_rollout(oracle, kPrompt, cfg);
    EXPECT_EQ(flat.nodes.size(), 1u);
    EXPECT_TRUE(flat.branch_events.empty());
  }
}

RolloutNode node_from_words(std::size_t id, const std::string& text) {
  RolloutNode n;
  n.node_id = id;
  n.complete = true;
  std::size_t start = 0;
  while (start < text.size()) {
    auto next = text.find(' ', start + 1);
    if (next == std::string::npos) next = text.size();
    n.tokens.push_back({text.substr(start, next - start), {1.0}, 0.0});
    start = next;
  }
  return n;
}

std::string easy_trace(std::size_t words, const std::string& answer) {
  std::string body;
  for (std::size_t i = 0; i < words; ++i) body += " s";
  return "<think> <easy>" + body + " </easy> </think> " + answer;
}

TEST(SelectBest, Examples) {
  const RewardConfig cfg;
  RolloutTree single;
  single.nodes.push_back(node_from_words(0, easy_trace(3, "42")));
  const auto one = select_best(single, "42", cfg);
  EXPECT_EQ(one.node_id, 0u);
  EXPECT_GE(one.reward.total, cfg.beta);

  RolloutTree gated;
  gated.nodes.push_back(node_from_words(0, "<think> <easy> s s </think> 42"));
  gated.nodes.push_back(node_from_words(1, easy_trace(3, "42")));
  EXPECT_EQ(select_best(gated, "42", cfg).node_id, 1u);

  RolloutTree tie;
  tie.nodes.push_back(node_from_words(0, easy_trace(120 - 5, "42")));
  tie.nodes.push_back(node_from_words(1, easy_trace(80 - 5, "42")));
  ASSERT_EQ(tie.nodes[0].tokens.size(), 120u);
  ASSERT_EQ(tie.nodes[1].tokens.size(), 80u);
  EXPECT_EQ(select_best(tie, "42", cfg).node_id, 1u);

  RolloutTree none;
  none.nodes.push_back(node_from_words(0, easy_trace(3, "42")));
  none.nodes[0].complete = false;
  EXPECT_EQ(code_of([&] { select_best(none, "42", cfg); }), ErrorCode::NoCompleteNode);
}

TEST(CounterRng, StreamsAreIndependentOfOrder) {
  CounterRng a(7, 3, 1);
  CounterRng b(7, 3, 1);
  CounterRng other(7, 4, 1);
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, other.next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double d = a.next_double();
    EXPECT_GE(d, 0.0);
    EXPECT_LT(d, 1.0);
  }
}

}  // namespace
}  // namespace adr
