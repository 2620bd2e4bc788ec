#pragma once

// Hybrid reasoning data construction:
//   segment -> label -> compress easy units -> annotate -> validate -> emit
//
// Hard units are never rewritten. Labeling happens before compression and is
// never revisited.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adr/answer.hpp"
#include "adr/lexicon.hpp"
#include "adr/rewriter.hpp"
#include "adr/text.hpp"
#include "adr/trace_format.hpp"

namespace adr {

struct TokenEntropy {
  std::string token;
  double entropy = 0.0;
};

struct SourceRecord {
  std::string id;
  std::string problem;
  std::string cot;
  std::string answer;
  std::optional<std::string> gold_answer;
  std::vector<TokenEntropy> entropy_trace;
};

// Throws Error(InvalidArgument) when a required field is missing or not a string.
SourceRecord source_record_from_json(const nlohmann::json& j);

// Paragraphs (blank-line separated) are units; a sentence or line that opens
// with a lexicon keyword also starts a new unit. Spans index into cot and
// exclude surrounding whitespace.
std::vector<ByteSpan> segment_cot_spans(std::string_view cot, const KeywordLexicon& lexicon = {});
std::vector<std::string> segment_cot(std::string_view cot, const KeywordLexicon& lexicon = {});

// Hard iff the unit has a lexicon keyword, or its mean token entropy (when
// known) exceeds the threshold.
std::vector<ReasoningMode> label_units(std::span<const std::string> units, const KeywordLexicon& lexicon,
                                       std::span<const std::optional<double>> unit_mean_entropy = {},
                                       std::optional<double> entropy_threshold = std::nullopt);

struct CompressionOutcome {
  std::string text;
  bool rejected = false;
  std::string reject_reason;
  std::size_t original_tokens = 0;
  std::size_t compressed_tokens = 0;
};

// Calls the client and validates its output: non-empty, no tag strings, no
// lexicon keywords, and no more tokens than the input. On failure the input
// is kept and the outcome is flagged. Client errors propagate.
CompressionOutcome compress_easy(std::string_view unit_text, const RewriterClient& client,
                                 const PromptTemplate& prompt, const KeywordLexicon& lexicon = {},
                                 const TokenCounter& counter = default_token_counter());

// Builds the trace, merging adjacent units of the same mode with a single
// space. Throws Error(LengthMismatch) when sizes differ or are zero.
HybridTrace annotate(std::span<const std::string> units, std::span<const ReasoningMode> modes, std::string answer);

struct UnitProvenance {
  ReasoningMode mode = ReasoningMode::Easy;
  std::size_t original_tokens = 0;
  std::size_t compressed_tokens = 0;
  bool compression_rejected = false;
  std::string reject_reason;
  bool entropy_labeled = false;
};

struct DatasetRecord {
  std::string id;
  std::string problem;
  std::string trace_text;
  std::string answer;
  std::vector<UnitProvenance> units;
  std::size_t original_easy_tokens = 0;
  std::size_t compressed_easy_tokens = 0;
  double p_hard = 0.0;

  nlohmann::json to_json() const;
};

struct CuratorConfig {
  KeywordLexicon lexicon;
  // Unset: the given quantile of unit-mean entropy over the corpus.
  std::optional<double> entropy_threshold;
  double threshold_quantile = 0.75;
  PromptTemplate prompt = PromptTemplate::cod_shortening();
  std::size_t jobs = 1;
  bool gold_filter = false;
  AnswerMatcher matcher = AnswerMatcher::ExactNumeric;
  TokenCounter counter = default_token_counter();
};

struct CurationReport {
  std::size_t processed = 0;
  std::size_t emitted = 0;
  std::size_t skipped = 0;
  std::size_t compression_rejected = 0;
  std::size_t easy_units = 0;
  std::size_t hard_units = 0;
  std::size_t entropy_only_hard_units = 0;
  std::size_t original_easy_tokens = 0;
  std::size_t compressed_easy_tokens = 0;
  std::optional<double> entropy_threshold;
  // Ten equal-width bins over p_hard in [0, 1]; p_hard = 1 lands in the last.
  std::array<std::size_t, 10> p_hard_histogram{};
  std::map<std::string, std::size_t> skip_reasons;

  double easy_token_reduction() const;
  void merge(const CurationReport& other);
  nlohmann::json to_json() const;
};

struct CurateOutcome {
  std::optional<DatasetRecord> record;
  std::string skip_reason;
  std::string detail;
};

// Runs one record through the pipeline. Never throws for per-record
// problems; they come back as a skip reason.
CurateOutcome curate_record(const SourceRecord& source, const CuratorConfig& config, const RewriterClient& client,
                            std::optional<double> entropy_threshold);

// Mean entropy of the tokens whose first byte falls inside each span. Empty
// optionals when the trace does not concatenate to cot or a span has no token.
std::vector<std::optional<double>> unit_mean_entropies(std::string_view cot, std::span<const ByteSpan> spans,
                                                       std::span<const TokenEntropy> trace);

// Linear-interpolation quantile; q in [0, 1]. Empty input gives nullopt.
std::optional<double> quantile(std::vector<double> values, double q);

// Streams input JSONL to output JSONL. Writes <out>.manifest.json with the
// final status. Throws Error(Io) on I/O failure after recording a partial
// manifest.
CurationReport curate_corpus(const std::filesystem::path& input, const std::filesystem::path& output,
                             const CuratorConfig& config, const RewriterClient& client);

}  // namespace adr
