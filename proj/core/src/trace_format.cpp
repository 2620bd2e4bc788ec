#include "adr/trace_format.hpp"

#include <algorithm>

#include "adr/error.hpp"

namespace adr {

std::string_view to_string(ReasoningMode mode) { return mode == ReasoningMode::Easy ? "easy" : "hard"; }

std::optional<ReasoningMode> parse_mode(std::string_view name) {
  if (name == "easy" || name == "Easy") return ReasoningMode::Easy;
  if (name == "hard" || name == "Hard") return ReasoningMode::Hard;
  return std::nullopt;
}

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::MissingThink: return "MISSING_THINK";
    case ViolationCode::UnclosedTag: return "UNCLOSED_TAG";
    case ViolationCode::NestedTag: return "NESTED_TAG";
    case ViolationCode::EmptyUnit: return "EMPTY_UNIT";
    case ViolationCode::TextOutsideUnits: return "TEXT_OUTSIDE_UNITS";
    case ViolationCode::MissingAnswer: return "MISSING_ANSWER";
    case ViolationCode::TagMismatch: return "TAG_MISMATCH";
  }
  return "UNKNOWN";
}

bool contains_tag(std::string_view s) {
  return std::any_of(std::begin(tags::kAll), std::end(tags::kAll),
                     [&](std::string_view t) { return s.find(t) != std::string_view::npos; });
}

bool ParseReport::has(ViolationCode code) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

HybridTrace make_trace(std::vector<std::pair<ReasoningMode, std::string>> units, std::string answer) {
  HybridTrace t;
  t.units.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    t.units.push_back({units[i].first, std::move(units[i].second), i});
  }
  t.answer = std::move(answer);
  return t;
}

std::string check_trace(const HybridTrace& trace) {
  if (trace.units.empty()) return "trace has no units";
  for (std::size_t i = 0; i < trace.units.size(); ++i) {
    const auto& u = trace.units[i];
    if (u.index != i) return "unit index " + std::to_string(u.index) + " at position " + std::to_string(i);
    if (is_blank(u.text)) return "unit " + std::to_string(i) + " is empty";
    if (contains_tag(u.text)) return "unit " + std::to_string(i) + " contains a tag string";
  }
  if (is_blank(trace.answer)) return "answer is empty";
  if (contains_tag(trace.answer)) return "answer contains a tag string";
  return {};
}

namespace {

enum class Tag { None, ThinkOpen, ThinkClose, EasyOpen, EasyClose, HardOpen, HardClose };

// Identifies a tag starting at text[pos]; text[pos] is '<'.
Tag match_tag(std::string_view text, std::size_t pos, std::size_t& len) {
  const auto rest = text.substr(pos);
  const std::pair<std::string_view, Tag> table[] = {
      {tags::kThinkOpen, Tag::ThinkOpen}, {tags::kThinkClose, Tag::ThinkClose},
      {tags::kEasyOpen, Tag::EasyOpen},   {tags::kEasyClose, Tag::EasyClose},
      {tags::kHardOpen, Tag::HardOpen},   {tags::kHardClose, Tag::HardClose},
  };
  for (const auto& [literal, tag] : table) {
    if (rest.starts_with(literal)) {
      len = literal.size();
      return tag;
    }
  }
  len = 0;
  return Tag::None;
}

bool is_unit_open(Tag t) { return t == Tag::EasyOpen || t == Tag::HardOpen; }
bool is_unit_close(Tag t) { return t == Tag::EasyClose || t == Tag::HardClose; }
bool is_open(Tag t) { return t == Tag::ThinkOpen || is_unit_open(t); }

Tag closer_for(Tag open) {
  switch (open) {
    case Tag::ThinkOpen: return Tag::ThinkClose;
    case Tag::EasyOpen: return Tag::EasyClose;
    case Tag::HardOpen: return Tag::HardClose;
    default: return Tag::None;
  }
}

struct OpenTag {
  Tag tag;
  std::size_t offset;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseReport run() {
    if (text_.find(tags::kThinkOpen) == std::string_view::npos) {
      add(ViolationCode::MissingThink, 0, "no <think> block");
      return finish();
    }

    std::size_t pos = 0;
    std::size_t text_start = 0;
    while (pos < text_.size()) {
      const std::size_t lt = text_.find('<', pos);
      if (lt == std::string_view::npos) break;
      std::size_t len = 0;
      const Tag tag = match_tag(text_, lt, len);
      if (tag == Tag::None) {
        pos = lt + 1;
        continue;
      }
      on_text(text_start, lt);
      on_tag(tag, lt, len);
      pos = lt + len;
      text_start = pos;
    }
    on_text(text_start, text_.size());
    on_end();
    return finish();
  }

 private:
  enum class State { Before, InThink, InUnit, After };

  void add(ViolationCode code, std::size_t offset, std::string message) {
    report_.violations.push_back({code, offset, std::move(message)});
  }

  void on_text(std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    const auto chunk = text_.substr(begin, end - begin);
    if (state_ == State::Before || state_ == State::InThink) {
      if (!is_blank(chunk)) {
        std::size_t first = begin;
        while (first < end && is_space(text_[first])) ++first;
        add(ViolationCode::TextOutsideUnits, first,
            state_ == State::Before ? "text before <think>" : "text inside <think> outside any unit");
      }
    }
    // Unit content and answer text are sliced by offset when their block closes.
  }

  void on_tag(Tag tag, std::size_t off, std::size_t len) {
    switch (state_) {
      case State::Before:
        if (tag == Tag::ThinkOpen) {
          think_offset_ = off;
          state_ = State::InThink;
        } else {
          add(ViolationCode::TagMismatch, off, "tag before <think>");
        }
        break;

      case State::InThink:
        if (is_unit_open(tag)) {
          unit_open_ = {tag, off};
          unit_content_begin_ = off + len;
          nested_.clear();
          state_ = State::InUnit;
        } else if (tag == Tag::ThinkOpen) {
          add(ViolationCode::NestedTag, off, "<think> inside <think>");
        } else if (is_unit_close(tag)) {
          add(ViolationCode::TagMismatch, off, "closing tag without an open unit");
        } else {
          close_think(off, len);
        }
        break;

      case State::InUnit:
        on_tag_in_unit(tag, off, len);
        break;

      case State::After:
        add(ViolationCode::TagMismatch, off, "tag after </think>");
        break;
    }
  }

  void on_tag_in_unit(Tag tag, std::size_t off, std::size_t len) {
    if (is_open(tag)) {
      add(ViolationCode::NestedTag, off, "tag opened inside a unit");
      nested_.push_back({tag, off});
      return;
    }
    if (!nested_.empty()) {
      if (closer_for(nested_.back().tag) == tag) {
        nested_.pop_back();
        return;
      }
      if (tag != Tag::ThinkClose) {
        add(ViolationCode::TagMismatch, off, "closing tag does not match the nested opener");
        nested_.pop_back();
        return;
      }
      for (const auto& n : nested_) add(ViolationCode::UnclosedTag, n.offset, "nested tag never closed");
      nested_.clear();
    }
    if (tag == Tag::ThinkClose) {
      add(ViolationCode::UnclosedTag, unit_open_.offset, "unit not closed before </think>");
      close_think(off, len);
      return;
    }
    if (tag != closer_for(unit_open_.tag)) {
      add(ViolationCode::TagMismatch, off, "unit closed with the wrong tag");
    }
    finish_unit(off);
    state_ = State::InThink;
  }

  void finish_unit(std::size_t close_off) {
    const auto raw = text_.substr(unit_content_begin_, close_off - unit_content_begin_);
    const auto content = trim(raw);
    if (content.empty()) {
      add(ViolationCode::EmptyUnit, unit_open_.offset, "unit has no content");
      return;
    }
    const auto mode = unit_open_.tag == Tag::EasyOpen ? ReasoningMode::Easy : ReasoningMode::Hard;
    units_.push_back({mode, std::string(content), units_.size()});
    spans_.push_back({unit_content_begin_, close_off});
  }

  void close_think(std::size_t off, std::size_t len) {
    if (units_.empty() && !saw_unit_error()) {
      add(ViolationCode::EmptyUnit, think_offset_, "think block contains no units");
    }
    answer_begin_ = off + len;
    state_ = State::After;
  }

  bool saw_unit_error() const { return !report_.violations.empty(); }

  void on_end() {
    switch (state_) {
      case State::Before:
        break;
      case State::InUnit:
        for (const auto& n : nested_) add(ViolationCode::UnclosedTag, n.offset, "nested tag never closed");
        add(ViolationCode::UnclosedTag, unit_open_.offset, "unit never closed");
        add(ViolationCode::UnclosedTag, think_offset_, "<think> never closed");
        break;
      case State::InThink:
        add(ViolationCode::UnclosedTag, think_offset_, "<think> never closed");
        break;
      case State::After: {
        const auto answer = trim(text_.substr(answer_begin_));
        if (answer.empty()) {
          add(ViolationCode::MissingAnswer, text_.size(), "no answer after </think>");
        }
        answer_ = std::string(answer);
        break;
      }
    }
  }

  ParseReport finish() {
    std::stable_sort(report_.violations.begin(), report_.violations.end(),
                     [](const Violation& a, const Violation& b) { return a.offset < b.offset; });
    if (report_.violations.empty()) {
      HybridTrace trace;
      trace.units = std::move(units_);
      trace.answer = std::move(answer_);
      report_.trace = std::move(trace);
      report_.unit_spans = std::move(spans_);
      report_.ok = true;
    }
    return std::move(report_);
  }

  std::string_view text_;
  ParseReport report_;
  State state_ = State::Before;
  std::size_t think_offset_ = 0;
  OpenTag unit_open_{Tag::None, 0};
  std::size_t unit_content_begin_ = 0;
  std::vector<OpenTag> nested_;
  std::size_t answer_begin_ = 0;
  std::vector<ReasoningUnit> units_;
  std::vector<ByteSpan> spans_;
  std::string answer_;
};

}  // namespace

ParseReport parse_trace(std::string_view text) { return Parser(text).run(); }

std::string render_trace(const HybridTrace& trace) {
  if (auto problem = check_trace(trace); !problem.empty()) {
    throw Error(ErrorCode::InvalidTrace, problem);
  }
  std::string out(tags::kThinkOpen);
  for (const auto& u : trace.units) {
    const bool easy = u.mode == ReasoningMode::Easy;
    out += ' ';
    out += easy ? tags::kEasyOpen : tags::kHardOpen;
    out += ' ';
    out += trim(u.text);
    out += ' ';
    out += easy ? tags::kEasyClose : tags::kHardClose;
  }
  out += ' ';
  out += tags::kThinkClose;
  out += ' ';
  out += trim(trace.answer);
  return out;
}

ModeRatios mode_token_ratios(const HybridTrace& trace, const TokenCounter& counter) {
  std::size_t easy = 0;
  std::size_t total = 0;
  for (const auto& u : trace.units) {
    const std::size_t n = counter(u.text);
    total += n;
    if (u.mode == ReasoningMode::Easy) easy += n;
  }
  if (total == 0) {
    throw Error(ErrorCode::InvalidArgument, "token counter returned zero tokens for every unit");
  }
  ModeRatios r;
  r.p_easy = static_cast<double>(easy) / static_cast<double>(total);
  r.p_hard = 1.0 - r.p_easy;
  return r;
}

}  // namespace adr
