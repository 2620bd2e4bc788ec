#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numeric>

#include "adr/answer.hpp"
#include "adr/error.hpp"
#include "adr/lexicon.hpp"
#include "adr/reward.hpp"
#include "support/gen.hpp"

namespace adr {
namespace {

using testing::Rng;

// Exact rational from a decimal literal or an a/b fraction, for checking the
// numeric matcher without floating point.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

Rational rational_from(const std::string& s) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
  const auto dot = s.find('.');
  if (dot == std::string::npos) return {std::stoll(s), 1};
  const auto frac = s.substr(dot + 1);
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  return {std::stoll(s.substr(0, dot)) * den + std::stoll(frac), den};
}

bool rational_equal(const Rational& a, const Rational& b) { return a.num * b.den == b.num * a.den; }

TEST(Answer, BoxedStripping) {
  EXPECT_EQ(accuracy_reward("\\boxed{42}", "42"), 1);
  EXPECT_EQ(strip_boxed("so \\boxed{\\frac{1}{2}} done"), "\\frac{1}{2}");
  EXPECT_EQ(strip_boxed("\\boxed{1} then \\boxed{2}"), "2");
  EXPECT_EQ(strip_boxed("\\boxed{unbalanced"), "\\boxed{unbalanced");
}

TEST(Answer, DecimalEqualsFraction) {
  ASSERT_TRUE(rational_equal(rational_from("0.50"), rational_from("1/2")));
  EXPECT_EQ(accuracy_reward("0.50", "1/2"), 1);
}

TEST(Answer, Mismatch) {
  EXPECT_EQ(accuracy_reward("7", "8"), 0);
  EXPECT_EQ(accuracy_reward("0.50", "1/2", AnswerMatcher::Exact), 0);
  EXPECT_EQ(accuracy_reward("inf", "inf"), 1);
  EXPECT_EQ(accuracy_reward("inf", "nan"), 0);
}

TEST(Answer, NumericForms) {
  EXPECT_DOUBLE_EQ(*parse_numeric("\\frac{3}{4}"), 0.75);
  EXPECT_DOUBLE_EQ(*parse_numeric("-\\dfrac{1}{8}"), -0.125);
  EXPECT_DOUBLE_EQ(*parse_numeric("+2.5"), 2.5);
  EXPECT_FALSE(parse_numeric("1/0").has_value());
  EXPECT_FALSE(parse_numeric("x").has_value());
  EXPECT_FALSE(parse_numeric("1/2/3").has_value());
}

TEST(Answer, RationalOracleAgreesOnRandomPairs) {
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const auto a = 1 + static_cast<std::int64_t>(testing::uniform_index(rng, 40));
    const auto b = 1 + static_cast<std::int64_t>(testing::uniform_index(rng, 40));
    const auto c = 1 + static_cast<std::int64_t>(testing::uniform_index(rng, 40));
    const auto d = 1 + static_cast<std::int64_t>(testing::uniform_index(rng, 40));
    const auto lhs = std::to_string(a) + "/" + std::to_string(b);
    const auto rhs = std::to_string(c) + "/" + std::to_string(d);
    EXPECT_EQ(answers_equivalent(lhs, rhs), rational_equal({a, b}, {c, d})) << lhs << " vs " << rhs;
  }
}

TEST(Lexicon, WholeWordCaseSensitive) {
  const KeywordLexicon lex;
  EXPECT_TRUE(lex.matches("Wait, recheck"));
  EXPECT_TRUE(lex.matches("(However) fine"));
  EXPECT_FALSE(lex.matches("waiting for it"));
  EXPECT_FALSE(lex.matches("wait"));
  EXPECT_FALSE(lex.matches("Waits"));
  EXPECT_FALSE(lex.matches("Waité"));
  EXPECT_EQ(lex.count_matches("Wait. Wait, However"), 3u);
  EXPECT_TRUE(lex.starts_with_keyword("  Alternatively, try"));
  EXPECT_FALSE(lex.starts_with_keyword("Try Alternatively"));
}

TEST(Lexicon, Policies) {
  KeywordLexicon lex;
  lex.case_sensitive = false;
  EXPECT_TRUE(lex.matches("wait"));
  lex.whole_word = false;
  EXPECT_TRUE(lex.matches("awaiting"));
  EXPECT_THROW(KeywordLexicon::from_list({}).validate(), Error);
  EXPECT_THROW(KeywordLexicon::from_list({""}).validate(), Error);
}

TEST(Reward, FormatReward) {
  EXPECT_EQ(format_reward(parse_trace("<think> <easy> a </easy> <hard> Wait </hard> <easy> b </easy> </think> 1")), 1);
  EXPECT_EQ(format_reward(parse_trace("<think> <easy> a </easy> </think>")), 0);
  EXPECT_EQ(format_reward(parse_trace("<think> <easy> a <hard> b </hard> </easy> </think> 1")), 0);
}

TEST(Reward, UnitSemanticReward) {
  const KeywordLexicon lex;
  EXPECT_EQ(unit_semantic_reward(
                make_trace({{ReasoningMode::Easy, "add the terms"}, {ReasoningMode::Hard, "Wait, the sign flips"}}, "1"),
                lex),
            1);
  EXPECT_EQ(unit_semantic_reward(make_trace({{ReasoningMode::Easy, "Wait, compute again"}}, "1"), lex), 0);
  EXPECT_EQ(unit_semantic_reward(make_trace({{ReasoningMode::Hard, "proceed with substitution"}}, "1"), lex), 0);
}

GroupSample sample(bool correct, double p_easy) {
  GroupSample s;
  s.correct = correct;
  s.p_easy = p_easy;
  s.p_hard = 1.0 - p_easy;
  return s;
}

TEST(Reward, ModeControlWorkedValues) {
  const RewardConfig cfg;
  const std::vector<GroupSample> all_pass{sample(true, 1.0), sample(true, 0.5)};
  EXPECT_EQ(mode_control_reward(all_pass, 0, cfg), 1.0);
  const std::vector<GroupSample> none_pass{sample(false, 0.0), sample(false, 0.5)};
  EXPECT_EQ(mode_control_reward(none_pass, 0, cfg), 1.0);
  const std::vector<GroupSample> half{sample(true, 0.6), sample(false, 0.2)};
  // 7/10 + 3/10 * (1/2 * 3/5 + 1/2 * 2/5) = 17/20
  EXPECT_NEAR(mode_control_reward(half, 0, cfg), 17.0 / 20.0, 1e-15);
}

TEST(Reward, ModeControlEmptyGroup) {
  try {
    mode_control_reward({}, 0, RewardConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGroup);
  }
}

TEST(Reward, TotalRewardExamples) {
  const RewardConfig cfg;
  const auto clean = make_group_sample("<think> <easy> one two three </easy> </think> \\boxed{5}", "5", cfg);
  EXPECT_EQ(total_reward(0, std::vector{clean, clean}, cfg).total, 1.0);

  const auto bad = make_group_sample("<think> <easy> a </think> 5", "5", cfg);
  const auto r = total_reward(0, std::vector{bad, clean}, cfg);
  EXPECT_EQ(r.total, 0.0);
  EXPECT_EQ(r.r_format, 0);

  const auto mixed = make_group_sample(
      "<think> <easy> a b c d e f </easy> <hard> Wait x y z </hard> </think> 5", "5", cfg);
  const auto wrong = make_group_sample("<think> <easy> a </easy> </think> 6", "5", cfg);
  ASSERT_DOUBLE_EQ(mixed.p_easy, 0.6);
  EXPECT_NEAR(total_reward(0, std::vector{mixed, wrong}, cfg).total, 0.85, 1e-12);
}

TEST(Reward, Advantages) {
  const std::vector<double> flat{1.0, 1.0, 1.0};
  EXPECT_EQ(group_advantages(flat), (std::vector<double>{0, 0, 0}));
  // Population std of {0, 1} is 1/2, so advantages are (x - 1/2) / (1/2).
  const std::vector<double> two{0.0, 1.0};
  const auto adv = group_advantages(two);
  EXPECT_DOUBLE_EQ(adv[0], -1.0);
  EXPECT_DOUBLE_EQ(adv[1], 1.0);
  try {
    group_advantages({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GroupTooSmall);
  }
  EXPECT_THROW(group_advantages(std::vector<double>{1.0}), Error);
}

TEST(RewardProperties, GatingAndRange) {
  Rng rng(22);
  const RewardConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    std::vector<GroupSample> group;
    const auto n = 1 + testing::uniform_index(rng, 8);
    for (std::size_t j = 0; j < n; ++j) {
      auto text = render_trace(testing::random_trace(rng));
      if (testing::uniform_index(rng, 5) == 0) text = text.substr(0, testing::uniform_index(rng, text.size()));
      group.push_back(make_group_sample(text, testing::uniform_index(rng, 2) ? "42" : "7", cfg));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto r = total_reward(j, group, cfg);
      EXPECT_GE(r.r_mode, cfg.beta);
      EXPECT_LE(r.r_mode, 1.0);
      if (r.r_format == 0 || r.r_accuracy == 0 || r.r_unit == 0) {
        EXPECT_EQ(r.total, 0.0);
      } else {
        EXPECT_GE(r.total, cfg.beta);
        EXPECT_LE(r.total, 1.0);
      }
    }
  }
}

TEST(RewardProperties, MonotoneInPassRate) {
  Rng rng(23);
  const RewardConfig cfg;
  for (int i = 0; i < 500; ++i) {
    const auto n = 2 + testing::uniform_index(rng, 15);
    const double p_easy = testing::uniform_real(rng, 0.0, 1.0);
    double prev = 0.0;
    for (std::size_t pass = 0; pass <= n; ++pass) {
      std::vector<GroupSample> group;
      for (std::size_t j = 0; j < n; ++j) group.push_back(sample(j < pass, j == 0 ? p_easy : 0.5));
      const double r = mode_control_reward(group, 0, cfg);
      if (pass > 0) {
        if (p_easy > 0.5) {
          EXPECT_GT(r, prev);
        }
        if (p_easy < 0.5) {
          EXPECT_LT(r, prev);
        }
      }
      prev = r;
    }
    std::vector<GroupSample> balanced{sample(true, 0.5), sample(false, 0.5)};
    EXPECT_DOUBLE_EQ(mode_control_reward(balanced, 0, cfg), 0.85);
  }
}

TEST(RewardProperties, UnitRewardMatchesBruteForce) {
  Rng rng(24);
  const KeywordLexicon lex;
  for (int i = 0; i < 1000; ++i) {
    const auto t = testing::random_trace(rng, 0.2);
    EXPECT_EQ(unit_semantic_reward(t, lex), testing::naive_unit_reward(t, lex.keywords)) << render_trace(t);
  }
}

TEST(RewardProperties, AdvantagesStandardized) {
  Rng rng(25);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> xs(2 + testing::uniform_index(rng, 14));
    for (auto& x : xs) x = testing::uniform_real(rng, 0.0, 1.0);
    const auto adv = group_advantages(xs);
    const double n = static_cast<double>(adv.size());
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : adv) ss += (a - mean) * (a - mean);
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(ss / n), 1.0, 1e-9);
  }
}

TEST(ScoreGroup, SingletonHasZeroAdvantage) {
  const RewardConfig cfg;
  const auto s = make_group_sample("<think> <easy> a </easy> </think> 1", "1", cfg);
  const auto out = score_group(std::vector{s}, cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].advantage, 0.0);
  EXPECT_EQ(out[0].reward.total, 1.0);
}

}  // namespace
}  // namespace adr
