#pragma once

// Four-factor reward for hybrid traces:
//
//   R = R_format * R_accuracy * R_unit * R_mode
//   R_mode = beta + (1 - beta) * (f * p_easy + (1 - f) * p_hard),  f = N_pass / N
//
// f is a group-level difficulty estimate; p_easy and p_hard belong to the
// sample being scored.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adr/answer.hpp"
#include "adr/lexicon.hpp"
#include "adr/text.hpp"
#include "adr/trace_format.hpp"

namespace adr {

struct RewardConfig {
  double beta = 0.7;
  KeywordLexicon lexicon;
  AnswerMatcher answer_matcher = AnswerMatcher::ExactNumeric;

  // Throws Error(InvalidConfig) unless 0 <= beta < 1 and the lexicon is valid.
  void validate() const;
};

struct GroupSample {
  std::string trace_text;
  std::string gold_answer;
  ParseReport parse;
  bool correct = false;
  double p_easy = 0.0;
  double p_hard = 0.0;
};

// Parses trace_text, grades its answer and computes its mode ratios.
GroupSample make_group_sample(std::string trace_text, std::string gold_answer, const RewardConfig& config,
                              const TokenCounter& counter = default_token_counter());

struct RewardBreakdown {
  int r_format = 0;
  int r_accuracy = 0;
  int r_unit = 0;
  double r_mode = 0.0;
  double total = 0.0;
};

int format_reward(const ParseReport& parse);

int accuracy_reward(std::string_view predicted_answer, std::string_view gold,
                    AnswerMatcher policy = AnswerMatcher::ExactNumeric);

// 1 iff every Easy unit has no keyword and every Hard unit has at least one.
int unit_semantic_reward(const HybridTrace& trace, const KeywordLexicon& lexicon);

// Throws Error(EmptyGroup) on an empty group.
double mode_control_reward(std::span<const GroupSample> group, std::size_t sample_index,
                           const RewardConfig& config);

RewardBreakdown total_reward(std::size_t sample_index, std::span<const GroupSample> group,
                             const RewardConfig& config);

// Group-normalized advantages (R_i - mean) / std with population std; all
// zeros when std < 1e-8. Throws Error(GroupTooSmall) for fewer than 2 values.
std::vector<double> group_advantages(std::span<const double> rewards);

struct ScoredSample {
  RewardBreakdown reward;
  double advantage = 0.0;
};

// Scores each member against its group. Singleton groups get advantage 0.
std::vector<ScoredSample> score_group(std::span<const GroupSample> group, const RewardConfig& config);

}  // namespace adr
