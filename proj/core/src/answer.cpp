#include "adr/answer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "adr/text.hpp"

namespace adr {

std::string_view to_string(AnswerMatcher m) { return m == AnswerMatcher::Exact ? "exact" : "exact_numeric"; }

std::optional<AnswerMatcher> parse_answer_matcher(std::string_view name) {
  if (name == "exact") return AnswerMatcher::Exact;
  if (name == "exact_numeric") return AnswerMatcher::ExactNumeric;
  return std::nullopt;
}

namespace {

// Index one past the brace that closes the group opened at s[open].
std::optional<std::size_t> match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) return i + 1;
  }
  return std::nullopt;
}

std::optional<double> parse_decimal(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  // from_chars accepts "inf"/"nan"; those are not answers.
  if (!std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<double> ratio(std::optional<double> num, std::optional<double> den) {
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

}  // namespace

std::string strip_boxed(std::string_view s) {
  constexpr std::string_view kBoxed = "\\boxed{";
  const auto pos = s.rfind(kBoxed);
  if (pos == std::string_view::npos) return std::string(s);
  const auto open = pos + kBoxed.size() - 1;
  const auto close = match_brace(s, open);
  if (!close) return std::string(s);
  return std::string(s.substr(open + 1, *close - open - 2));
}

std::string normalize_answer(std::string_view s) { return collapse_whitespace(strip_boxed(s)); }

std::optional<double> parse_numeric(std::string_view raw) {
  auto s = trim(raw);
  for (std::string_view frac : {"\\frac{", "\\dfrac{", "\\tfrac{"}) {
    if (!s.starts_with(frac)) continue;
    const auto open1 = frac.size() - 1;
    const auto close1 = match_brace(s, open1);
    if (!close1 || *close1 >= s.size() || s[*close1] != '{') return std::nullopt;
    const auto close2 = match_brace(s, *close1);
    if (!close2 || *close2 != s.size()) return std::nullopt;
    return ratio(parse_decimal(s.substr(open1 + 1, *close1 - open1 - 2)),
                 parse_decimal(s.substr(*close1 + 1, *close2 - *close1 - 2)));
  }
  if (s.starts_with("-\\")) {
    const auto v = parse_numeric(s.substr(1));
    if (v) return -*v;
    return std::nullopt;
  }
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    if (s.find('/', slash + 1) != std::string_view::npos) return std::nullopt;
    return ratio(parse_decimal(s.substr(0, slash)), parse_decimal(s.substr(slash + 1)));
  }
  return parse_decimal(s);
}

bool answers_equivalent(std::string_view predicted, std::string_view gold, AnswerMatcher matcher) {
  const auto p = normalize_answer(predicted);
  const auto g = normalize_answer(gold);
  if (p == g) return true;
  if (matcher == AnswerMatcher::Exact) return false;
  const auto pv = parse_numeric(p);
  const auto gv = parse_numeric(g);
  if (!pv || !gv) return false;
  const double scale = std::max(std::abs(*pv), std::abs(*gv));
  return std::abs(*pv - *gv) <= 1e-9 * scale;
}

}  // namespace adr
