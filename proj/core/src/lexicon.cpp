#include "adr/lexicon.hpp"

#include "adr/error.hpp"
#include "adr/text.hpp"

namespace adr {

KeywordLexicon KeywordLexicon::from_list(const std::vector<std::string>& words) {
  KeywordLexicon lex;
  lex.keywords = std::set<std::string>(words.begin(), words.end());
  lex.validate();
  return lex;
}

void KeywordLexicon::validate() const {
  if (keywords.empty()) throw Error(ErrorCode::InvalidConfig, "keyword lexicon is empty");
  for (const auto& k : keywords) {
    if (k.empty()) throw Error(ErrorCode::InvalidConfig, "keyword lexicon contains an empty keyword");
  }
}

namespace {

bool boundary_ok(std::string_view text, std::size_t pos, std::size_t len) {
  const bool left = pos == 0 || !is_word_byte(text[pos - 1]);
  const bool right = pos + len >= text.size() || !is_word_byte(text[pos + len]);
  return left && right;
}

std::size_t count_in(std::string_view hay, std::string_view needle, bool whole_word, bool stop_at_first) {
  std::size_t n = 0;
  std::size_t pos = hay.find(needle);
  while (pos != std::string_view::npos) {
    if (!whole_word || boundary_ok(hay, pos, needle.size())) {
      ++n;
      if (stop_at_first) return n;
    }
    pos = hay.find(needle, pos + 1);
  }
  return n;
}

}  // namespace

std::size_t KeywordLexicon::count_matches(std::string_view text) const {
  std::size_t total = 0;
  if (case_sensitive) {
    for (const auto& k : keywords) total += count_in(text, k, whole_word, false);
  } else {
    const auto hay = to_lower_ascii(text);
    for (const auto& k : keywords) total += count_in(hay, to_lower_ascii(k), whole_word, false);
  }
  return total;
}

bool KeywordLexicon::matches(std::string_view text) const {
  if (case_sensitive) {
    for (const auto& k : keywords) {
      if (count_in(text, k, whole_word, true) > 0) return true;
    }
    return false;
  }
  const auto hay = to_lower_ascii(text);
  for (const auto& k : keywords) {
    if (count_in(hay, to_lower_ascii(k), whole_word, true) > 0) return true;
  }
  return false;
}

bool KeywordLexicon::starts_with_keyword(std::string_view text) const {
  const auto t = trim(text);
  const std::string hay = case_sensitive ? std::string(t) : to_lower_ascii(t);
  for (const auto& k : keywords) {
    const std::string needle = case_sensitive ? k : to_lower_ascii(k);
    if (hay.starts_with(needle) && (!whole_word || boundary_ok(hay, 0, needle.size()))) return true;
  }
  return false;
}

}  // namespace adr
