#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace adr {

// Reflection/verification keywords that mark slow-thinking content.
struct KeywordLexicon {
  std::set<std::string> keywords{"Wait", "However", "Alternatively"};
  bool whole_word = true;
  bool case_sensitive = true;

  static KeywordLexicon from_list(const std::vector<std::string>& words);

  // Throws Error(InvalidConfig) on an empty keyword set or empty keyword.
  void validate() const;

  bool matches(std::string_view text) const;
  std::size_t count_matches(std::string_view text) const;

  // True when a keyword occurs as the first word of text.
  bool starts_with_keyword(std::string_view text) const;
};

}  // namespace adr
