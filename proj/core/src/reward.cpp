#include "adr/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adr/error.hpp"

namespace adr {

void RewardConfig::validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "beta must lie in [0, 1), got " + std::to_string(beta));
  }
  lexicon.validate();
}

GroupSample make_group_sample(std::string trace_text, std::string gold_answer, const RewardConfig& config,
                              const TokenCounter& counter) {
  GroupSample s;
  s.parse = parse_trace(trace_text);
  s.trace_text = std::move(trace_text);
  s.gold_answer = std::move(gold_answer);
  if (s.parse.ok) {
    s.correct = accuracy_reward(s.parse.trace->answer, s.gold_answer, config.answer_matcher) == 1;
    const auto ratios = mode_token_ratios(*s.parse.trace, counter);
    s.p_easy = ratios.p_easy;
    s.p_hard = ratios.p_hard;
  }
  return s;
}

int format_reward(const ParseReport& parse) { return parse.ok ? 1 : 0; }

int accuracy_reward(std::string_view predicted_answer, std::string_view gold, AnswerMatcher policy) {
  return answers_equivalent(predicted_answer, gold, policy) ? 1 : 0;
}

int unit_semantic_reward(const HybridTrace& trace, const KeywordLexicon& lexicon) {
  for (const auto& u : trace.units) {
    const bool has_keyword = lexicon.matches(u.text);
    const bool ok = u.mode == ReasoningMode::Easy ? !has_keyword : has_keyword;
    if (!ok) return 0;
  }
  return 1;
}

double mode_control_reward(std::span<const GroupSample> group, std::size_t sample_index,
                           const RewardConfig& config) {
  if (group.empty()) throw Error(ErrorCode::EmptyGroup, "mode control reward needs at least one sample");
  if (sample_index >= group.size()) {
    throw Error(ErrorCode::InvalidArgument, "sample index " + std::to_string(sample_index) + " out of range");
  }
  const auto n_pass = std::count_if(group.begin(), group.end(), [](const GroupSample& s) { return s.correct; });
  const double pass_rate = static_cast<double>(n_pass) / static_cast<double>(group.size());
  const auto& s = group[sample_index];
  const double mix = pass_rate * s.p_easy + (1.0 - pass_rate) * s.p_hard;
  const double beta = config.beta;
  return std::clamp(beta + (1.0 - beta) * mix, beta, 1.0);
}

RewardBreakdown total_reward(std::size_t sample_index, std::span<const GroupSample> group,
                             const RewardConfig& config) {
  const double r_mode = mode_control_reward(group, sample_index, config);
  const auto& s = group[sample_index];
  RewardBreakdown r;
  r.r_format = format_reward(s.parse);
  r.r_accuracy = s.parse.ok && s.correct ? 1 : 0;
  r.r_unit = s.parse.ok ? unit_semantic_reward(*s.parse.trace, config.lexicon) : 0;
  r.r_mode = r_mode;
  r.total = static_cast<double>(r.r_format) * static_cast<double>(r.r_accuracy) *
            static_cast<double>(r.r_unit) * r.r_mode;
  return r;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) {
    throw Error(ErrorCode::GroupTooSmall, "advantages need at least 2 rewards, got " + std::to_string(rewards.size()));
  }
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<double> out(rewards.size(), 0.0);
  if (sd < 1e-8) return out;
  std::transform(rewards.begin(), rewards.end(), out.begin(), [&](double r) { return (r - mean) / sd; });
  return out;
}

std::vector<ScoredSample> score_group(std::span<const GroupSample> group, const RewardConfig& config) {
  std::vector<ScoredSample> out(group.size());
  std::vector<double> totals(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    out[i].reward = total_reward(i, group, config);
    totals[i] = out[i].reward.total;
  }
  if (group.size() >= 2) {
    const auto adv = group_advantages(totals);
    for (std::size_t i = 0; i < group.size(); ++i) out[i].advantage = adv[i];
  }
  return out;
}

}  // namespace adr
