#include <gtest/gtest.h>

#include "adr/config.hpp"
#include "adr/error.hpp"
#include "adr/serialize.hpp"
#include "support/tempdir.hpp"

#ifndef ADR_CONFIG_DIR
#error "ADR_CONFIG_DIR must point at the checked-in config directory"
#endif

namespace adr {
namespace {

using nlohmann::json;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(RunConfig, CheckedInDefaultsMatchCode) {
  const auto loaded = load_run_config(std::string(ADR_CONFIG_DIR) + "/default.json");
  EXPECT_EQ(loaded.to_json(), RunConfig{}.to_json());
  EXPECT_EQ(loaded.reward.beta, 0.7);
  EXPECT_EQ(loaded.branch.alpha, 0.5);
  EXPECT_EQ(loaded.branch.k, 8u);
  EXPECT_EQ(loaded.rollout.max_branches, 4u);
  EXPECT_EQ(loaded.max_tokens(), 16384u);
}

TEST(RunConfig, RoundTripIsIdempotent) {
  testing::TempDir dir;
  RunConfig c;
  c.reward.beta = 0.6;
  c.branch.alpha = 0.4;
  c.branch.delta_cap = 0.6;
  c.rollout.seed = 99;
  c.rollout.max_tokens = 100;
  c.curator.entropy_threshold = 1.25;
  c.paths["data"] = "/tmp/x";
  save_run_config(c, dir.file("a.json"));
  const auto once = load_run_config(dir.file("a.json"));
  save_run_config(once, dir.file("b.json"));
  EXPECT_EQ(testing::read_text(dir.file("a.json")), testing::read_text(dir.file("b.json")));
  EXPECT_EQ(once.to_json(), c.to_json());
}

TEST(RunConfig, StageRules) {
  json j = {{"rollout", {{"stage", "8k"}, {"edr_enabled", true}}}};
  EXPECT_EQ(code_of([&] { RunConfig::from_json(j); }), ErrorCode::InvalidConfig);
  j["rollout"]["edr_enabled"] = false;
  const auto c = RunConfig::from_json(j);
  EXPECT_EQ(c.max_tokens(), 8192u);
  j["rollout"]["max_tokens"] = 9000;
  EXPECT_EQ(code_of([&] { RunConfig::from_json(j); }), ErrorCode::InvalidConfig);
}

TEST(RunConfig, RejectsBadInput) {
  EXPECT_EQ(code_of([] { RunConfig::from_json({{"rewards", {}}}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { RunConfig::from_json({{"reward", {{"beta", 1.5}}}}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { RunConfig::from_json({{"reward", {{"beta", "x"}}}}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { RunConfig::from_json({{"reward", {{"lexicon", json::array()}}}}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { RunConfig::from_json({{"curator", {{"mock", false}}}}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { load_run_config("/nonexistent/config.json"); }), ErrorCode::Io);
}

TEST(RunConfig, DeltaCapFollowsAlpha) {
  const auto c = RunConfig::from_json({{"branch", {{"alpha", 0.3}}}});
  EXPECT_DOUBLE_EQ(c.branch.delta_cap, 0.7);
  const auto rc = c.rollout_config(3);
  EXPECT_EQ(rc.jobs, 3u);
  EXPECT_DOUBLE_EQ(rc.branch.alpha, 0.3);
}

TEST(Serialize, TokenEventForms) {
  const auto a = token_event_from_json({{"token", "x"}, {"probs", {0.5, 0.5}}});
  EXPECT_NEAR(a.entropy_nats, std::log(2.0), 1e-12);
  const auto b = token_event_from_json({{"token", "y"}, {"entropy", 1.25}});
  EXPECT_EQ(b.entropy_nats, 1.25);
  const auto c = token_event_from_json({{"token", "z"}, {"top_logprobs", {{"z", std::log(0.2)}, {"w", std::log(0.2)}}}});
  EXPECT_NEAR(c.entropy_nats, std::log(2.0), 1e-12);
  EXPECT_THROW(token_event_from_json({{"token", "q"}}), Error);
}

TEST(Serialize, ParseReport) {
  const auto j = to_json(parse_trace("<think> <easy> a </think> 1"));
  EXPECT_EQ(j.at("ok"), false);
  EXPECT_EQ(j.at("violations").at(0).at("code"), "UNCLOSED_TAG");
}

}  // namespace
}  // namespace adr
