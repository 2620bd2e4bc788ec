#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace adr {

enum class AnswerMatcher {
  ExactNumeric,  // normalized exact match, then numeric equality at 1e-9 relative
  Exact,         // normalized exact match only
};

std::string_view to_string(AnswerMatcher m);
std::optional<AnswerMatcher> parse_answer_matcher(std::string_view name);

// Replaces the last \boxed{...} with its contents (balanced braces).
std::string strip_boxed(std::string_view s);

// strip_boxed, then trim and collapse whitespace.
std::string normalize_answer(std::string_view s);

// Integers, decimals (with optional exponent), a/b, and \frac{a}{b} / \dfrac{a}{b}.
std::optional<double> parse_numeric(std::string_view s);

bool answers_equivalent(std::string_view predicted, std::string_view gold,
                        AnswerMatcher matcher = AnswerMatcher::ExactNumeric);

}  // namespace adr
