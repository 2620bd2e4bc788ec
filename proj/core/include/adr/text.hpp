#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace adr {

// ASCII whitespace only; the trace grammar is byte-oriented.
inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Word characters for keyword boundaries: ASCII alphanumerics and any
// non-ASCII byte (so UTF-8 letters never act as separators).
inline bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'A' && u <= 'Z') || (u >= 'a' && u <= 'z');
}

std::string_view trim(std::string_view s);
bool is_blank(std::string_view s);

// Trims and collapses internal whitespace runs to a single space.
std::string collapse_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Counts tokens in a string. Injected wherever token accounting matters.
using TokenCounter = std::function<std::size_t(std::string_view)>;

// Whitespace-delimited word count; the default TokenCounter.
std::size_t count_words(std::string_view s);
TokenCounter default_token_counter();

// 64-bit FNV-1a; stable across runs and platforms, used for cache keys.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace adr
