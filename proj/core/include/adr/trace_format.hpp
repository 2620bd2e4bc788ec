#pragma once

// Hybrid reasoning trace grammar:
//
//   <think> <easy> u1 </easy> <hard> u2 </hard> ... </think> answer
//
// Tags are plain ASCII markers in decoded text. Units may repeat a mode;
// alternation is not required.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adr/text.hpp"

namespace adr {

enum class ReasoningMode { Easy, Hard };

std::string_view to_string(ReasoningMode mode);
std::optional<ReasoningMode> parse_mode(std::string_view name);

namespace tags {
inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kEasyOpen = "<easy>";
inline constexpr std::string_view kEasyClose = "</easy>";
inline constexpr std::string_view kHardOpen = "<hard>";
inline constexpr std::string_view kHardClose = "</hard>";

inline constexpr std::string_view kAll[] = {kThinkOpen, kThinkClose, kEasyOpen,
                                            kEasyClose, kHardOpen,   kHardClose};
}  // namespace tags

// True if s contains any of the six tag strings.
bool contains_tag(std::string_view s);

struct ReasoningUnit {
  ReasoningMode mode = ReasoningMode::Easy;
  std::string text;
  std::size_t index = 0;

  bool operator==(const ReasoningUnit&) const = default;
};

struct HybridTrace {
  std::vector<ReasoningUnit> units;
  std::string answer;
  std::optional<std::size_t> raw_length_tokens;

  bool operator==(const HybridTrace&) const = default;
};

// Builds a trace with indices assigned 0..n-1.
HybridTrace make_trace(std::vector<std::pair<ReasoningMode, std::string>> units, std::string answer);

// Empty string when the trace satisfies every invariant, otherwise a
// description of the first violation.
std::string check_trace(const HybridTrace& trace);

enum class ViolationCode {
  MissingThink,
  UnclosedTag,
  NestedTag,
  EmptyUnit,
  TextOutsideUnits,
  MissingAnswer,
  TagMismatch,
};

std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::size_t offset;
  std::string message;
};

// Byte range [begin, end) of a unit's content inside the parsed text,
// between the end of its opening tag and the start of its closing tag.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct ParseReport {
  bool ok = false;
  std::optional<HybridTrace> trace;
  std::vector<Violation> violations;
  // Parallel to trace->units when ok.
  std::vector<ByteSpan> unit_spans;

  bool has(ViolationCode code) const;
};

// Total over arbitrary byte strings; never throws on malformed input.
ParseReport parse_trace(std::string_view text);

// Canonical serialization. Throws Error(InvalidTrace) if check_trace fails.
std::string render_trace(const HybridTrace& trace);

struct ModeRatios {
  double p_easy = 0.0;
  double p_hard = 0.0;
};

// Token share of each mode over unit content only (tags and answer excluded).
ModeRatios mode_token_ratios(const HybridTrace& trace, const TokenCounter& counter = default_token_counter());

}  // namespace adr
