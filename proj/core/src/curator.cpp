#include "adr/curator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "adr/entropy.hpp"
#include "adr/error.hpp"

namespace adr {

namespace {

ByteSpan trimmed_span(std::string_view text, std::size_t begin, std::size_t end) {
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return {begin, end};
}

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

void segment_paragraph(std::string_view cot, std::size_t pb, std::size_t pe, const KeywordLexicon& lexicon,
                       std::vector<ByteSpan>& out) {
  std::size_t unit_start = pb;
  std::size_t i = pb;
  while (i < pe) {
    if (!is_space(cot[i]) || i == pb) {
      ++i;
      continue;
    }
    std::size_t j = i;
    bool newline = false;
    while (j < pe && is_space(cot[j])) newline |= cot[j++] == '\n';
    const bool boundary = is_sentence_end(cot[i - 1]) || newline;
    if (boundary && j < pe && lexicon.starts_with_keyword(cot.substr(j, pe - j))) {
      const auto span = trimmed_span(cot, unit_start, i);
      if (span.begin < span.end) out.push_back(span);
      unit_start = j;
    }
    i = j;
  }
  const auto span = trimmed_span(cot, unit_start, pe);
  if (span.begin < span.end) out.push_back(span);
}

std::string str(std::string_view text, const ByteSpan& s) { return std::string(text.substr(s.begin, s.end - s.begin)); }

}  // namespace

SourceRecord source_record_from_json(const nlohmann::json& j) {
  auto field = [&](const char* name) -> std::string {
    if (!j.contains(name) || !j[name].is_string()) {
      throw Error(ErrorCode::InvalidArgument, std::string("missing string field '") + name + "'");
    }
    return j[name].get<std::string>();
  };
  SourceRecord r;
  if (j.contains("id")) r.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
  r.problem = field("problem");
  r.cot = field("cot");
  r.answer = field("answer");
  if (j.contains("gold_answer") && j["gold_answer"].is_string()) r.gold_answer = j["gold_answer"].get<std::string>();
  if (j.contains("entropy_trace") && j["entropy_trace"].is_array()) {
    for (const auto& e : j["entropy_trace"]) {
      TokenEntropy te;
      te.token = e.at("token").get<std::string>();
      if (e.contains("entropy")) {
        te.entropy = e.at("entropy").get<double>();
      } else {
        std::vector<std::pair<std::string, double>> top;
        for (const auto& p : e.at("top_logprobs")) top.emplace_back(p.at(0).get<std::string>(), p.at(1).get<double>());
        te.entropy = token_event_from_logprobs(te.token, top).entropy_nats;
      }
      r.entropy_trace.push_back(std::move(te));
    }
  }
  return r;
}

std::vector<ByteSpan> segment_cot_spans(std::string_view cot, const KeywordLexicon& lexicon) {
  std::vector<ByteSpan> out;
  std::size_t pos = 0;
  std::optional<std::size_t> para_begin;
  while (pos <= cot.size()) {
    const auto nl = cot.find('\n', pos);
    const std::size_t line_end = nl == std::string_view::npos ? cot.size() : nl;
    const bool blank = is_blank(cot.substr(pos, line_end - pos));
    if (!blank && !para_begin) para_begin = pos;
    if (blank && para_begin) {
      segment_paragraph(cot, *para_begin, pos, lexicon, out);
      para_begin.reset();
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (para_begin) segment_paragraph(cot, *para_begin, cot.size(), lexicon, out);
  return out;
}

std::vector<std::string> segment_cot(std::string_view cot, const KeywordLexicon& lexicon) {
  std::vector<std::string> out;
  for (const auto& s : segment_cot_spans(cot, lexicon)) out.push_back(str(cot, s));
  return out;
}

std::vector<ReasoningMode> label_units(std::span<const std::string> units, const KeywordLexicon& lexicon,
                                       std::span<const std::optional<double>> unit_mean_entropy,
                                       std::optional<double> entropy_threshold) {
  std::vector<ReasoningMode> modes;
  modes.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    bool hard = lexicon.matches(units[i]);
    if (!hard && entropy_threshold && i < unit_mean_entropy.size() && unit_mean_entropy[i]) {
      hard = *unit_mean_entropy[i] > *entropy_threshold;
    }
    modes.push_back(hard ? ReasoningMode::Hard : ReasoningMode::Easy);
  }
  return modes;
}

CompressionOutcome compress_easy(std::string_view unit_text, const RewriterClient& client,
                                 const PromptTemplate& prompt, const KeywordLexicon& lexicon,
                                 const TokenCounter& counter) {
  CompressionOutcome out;
  out.original_tokens = counter(unit_text);
  const std::string candidate(trim(client.shorten(unit_text, prompt)));
  const std::size_t candidate_tokens = counter(candidate);

  if (candidate.empty()) {
    out.reject_reason = "empty";
  } else if (contains_tag(candidate)) {
    out.reject_reason = "contains_tag";
  } else if (lexicon.matches(candidate)) {
    out.reject_reason = "contains_keyword";
  } else if (candidate_tokens > out.original_tokens) {
    out.reject_reason = "longer_than_input";
  }

  if (out.reject_reason.empty()) {
    out.text = candidate;
    out.compressed_tokens = candidate_tokens;
  } else {
    out.rejected = true;
    out.text = std::string(trim(unit_text));
    out.compressed_tokens = out.original_tokens;
  }
  return out;
}

HybridTrace annotate(std::span<const std::string> units, std::span<const ReasoningMode> modes, std::string answer) {
  if (units.size() != modes.size() || units.empty()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(units.size()) + " units vs " +
                                               std::to_string(modes.size()) + " modes");
  }
  std::vector<std::pair<ReasoningMode, std::string>> merged;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto text = trim(units[i]);
    if (!merged.empty() && merged.back().first == modes[i]) {
      merged.back().second += ' ';
      merged.back().second += text;
    } else {
      merged.emplace_back(modes[i], std::string(text));
    }
  }
  auto trace = make_trace(std::move(merged), std::string(trim(answer)));
  if (auto problem = check_trace(trace); !problem.empty()) throw Error(ErrorCode::InvalidTrace, problem);
  return trace;
}

nlohmann::json DatasetRecord::to_json() const {
  nlohmann::json units_json = nlohmann::json::array();
  std::size_t rejected = 0;
  for (const auto& u : units) {
    units_json.push_back({
        {"mode", to_string(u.mode)},
        {"original_tokens", u.original_tokens},
        {"compressed_tokens", u.compressed_tokens},
        {"compression_rejected", u.compression_rejected},
        {"entropy_labeled", u.entropy_labeled},
    });
    if (u.compression_rejected) units_json.back()["reject_reason"] = u.reject_reason;
    rejected += u.compression_rejected ? 1 : 0;
  }
  return {
      {"id", id},
      {"problem", problem},
      {"trace_text", trace_text},
      {"answer", answer},
      {"provenance",
       {
           {"source_id", id},
           {"units", units_json},
           {"original_easy_tokens", original_easy_tokens},
           {"compressed_easy_tokens", compressed_easy_tokens},
           {"compression_rejected", rejected},
       }},
  };
}

double CurationReport::easy_token_reduction() const {
  if (original_easy_tokens == 0) return 0.0;
  return 1.0 - static_cast<double>(compressed_easy_tokens) / static_cast<double>(original_easy_tokens);
}

void CurationReport::merge(const CurationReport& o) {
  processed += o.processed;
  emitted += o.emitted;
  skipped += o.skipped;
  compression_rejected += o.compression_rejected;
  easy_units += o.easy_units;
  hard_units += o.hard_units;
  entropy_only_hard_units += o.entropy_only_hard_units;
  original_easy_tokens += o.original_easy_tokens;
  compressed_easy_tokens += o.compressed_easy_tokens;
  for (std::size_t i = 0; i < p_hard_histogram.size(); ++i) p_hard_histogram[i] += o.p_hard_histogram[i];
  for (const auto& [reason, n] : o.skip_reasons) skip_reasons[reason] += n;
}

nlohmann::json CurationReport::to_json() const {
  nlohmann::json j = {
      {"processed", processed},
      {"emitted", emitted},
      {"skipped", skipped},
      {"compression_rejected", compression_rejected},
      {"easy_units", easy_units},
      {"hard_units", hard_units},
      {"entropy_only_hard_units", entropy_only_hard_units},
      {"original_easy_tokens", original_easy_tokens},
      {"compressed_easy_tokens", compressed_easy_tokens},
      {"easy_token_reduction", easy_token_reduction()},
      {"p_hard_histogram", p_hard_histogram},
      {"skip_reasons", skip_reasons},
  };
  j["entropy_threshold"] = entropy_threshold ? nlohmann::json(*entropy_threshold) : nlohmann::json(nullptr);
  return j;
}

std::vector<std::optional<double>> unit_mean_entropies(std::string_view cot, std::span<const ByteSpan> spans,
                                                       std::span<const TokenEntropy> trace) {
  std::vector<std::optional<double>> out(spans.size());
  if (trace.empty()) return out;
  std::size_t total = 0;
  for (const auto& t : trace) total += t.token.size();
  if (total != cot.size()) return out;
  std::string joined;
  joined.reserve(total);
  for (const auto& t : trace) joined += t.token;
  if (joined != cot) return out;

  std::vector<double> sum(spans.size(), 0.0);
  std::vector<std::size_t> count(spans.size(), 0);
  std::size_t offset = 0;
  std::size_t unit = 0;
  for (const auto& t : trace) {
    while (unit < spans.size() && offset >= spans[unit].end) ++unit;
    if (unit < spans.size() && offset >= spans[unit].begin) {
      sum[unit] += t.entropy;
      ++count[unit];
    }
    offset += t.token.size();
  }
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (count[i] > 0) out[i] = sum[i] / static_cast<double>(count[i]);
  }
  return out;
}

std::optional<double> quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

CurateOutcome curate_record(const SourceRecord& source, const CuratorConfig& config, const RewriterClient& client,
                            std::optional<double> entropy_threshold) {
  CurateOutcome outcome;
  auto skip = [&](std::string reason, std::string detail = {}) {
    outcome.skip_reason = std::move(reason);
    outcome.detail = std::move(detail);
    return outcome;
  };
  if (is_blank(source.problem) || is_blank(source.cot) || is_blank(source.answer)) return skip("empty_field");
  if (contains_tag(source.cot) || contains_tag(source.answer)) return skip("tag_in_source");
  if (config.gold_filter && source.gold_answer &&
      !answers_equivalent(source.answer, *source.gold_answer, config.matcher)) {
    return skip("gold_mismatch");
  }

  const auto spans = segment_cot_spans(source.cot, config.lexicon);
  if (spans.empty()) return skip("empty_field");
  std::vector<std::string> units;
  for (const auto& s : spans) units.push_back(str(source.cot, s));
  const auto entropies = unit_mean_entropies(source.cot, spans, source.entropy_trace);
  const auto modes = label_units(units, config.lexicon, entropies, entropy_threshold);

  DatasetRecord record;
  record.id = source.id;
  record.problem = source.problem;
  record.answer = source.answer;
  std::vector<std::string> texts;
  texts.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    UnitProvenance prov;
    prov.mode = modes[i];
    if (modes[i] == ReasoningMode::Easy) {
      CompressionOutcome c;
      try {
        c = compress_easy(units[i], client, config.prompt, config.lexicon, config.counter);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ClientUnavailable) throw;
        return skip("client_unavailable", e.what());
      }
      prov.original_tokens = c.original_tokens;
      prov.compressed_tokens = c.compressed_tokens;
      prov.compression_rejected = c.rejected;
      prov.reject_reason = c.reject_reason;
      record.original_easy_tokens += c.original_tokens;
      record.compressed_easy_tokens += c.compressed_tokens;
      texts.push_back(std::move(c.text));
    } else {
      prov.original_tokens = prov.compressed_tokens = config.counter(units[i]);
      prov.entropy_labeled = !config.lexicon.matches(units[i]);
      texts.push_back(units[i]);
    }
    record.units.push_back(std::move(prov));
  }

  HybridTrace trace;
  try {
    trace = annotate(texts, modes, source.answer);
    record.trace_text = render_trace(trace);
  } catch (const Error& e) {
    return skip("invalid_trace", e.what());
  }
  const auto check = parse_trace(record.trace_text);
  if (!check.ok) return skip("invalid_trace", "constructed trace does not parse");
  try {
    record.p_hard = mode_token_ratios(*check.trace, config.counter).p_hard;
  } catch (const Error&) {
    record.p_hard = 0.0;
  }
  outcome.record = std::move(record);
  return outcome;
}

namespace {

struct LineOutcome {
  CurateOutcome outcome;
  bool blank = false;
};

LineOutcome process_line(const std::string& line, std::size_t line_no, const CuratorConfig& config,
                         const RewriterClient& client, std::optional<double> threshold) {
  LineOutcome lo;
  if (is_blank(line)) {
    lo.blank = true;
    return lo;
  }
  SourceRecord source;
  try {
    source = source_record_from_json(nlohmann::json::parse(line));
  } catch (const std::exception& e) {
    lo.outcome.skip_reason = "bad_record";
    lo.outcome.detail = e.what();
    return lo;
  }
  if (source.id.empty()) source.id = std::to_string(line_no);
  try {
    lo.outcome = curate_record(source, config, client, threshold);
  } catch (const std::exception& e) {
    lo.outcome = {};
    lo.outcome.skip_reason = "record_error";
    lo.outcome.detail = e.what();
  }
  return lo;
}

void tally(const LineOutcome& lo, CurationReport& report) {
  if (lo.blank) return;
  ++report.processed;
  if (!lo.outcome.record) {
    ++report.skipped;
    ++report.skip_reasons[lo.outcome.skip_reason];
    return;
  }
  const auto& r = *lo.outcome.record;
  ++report.emitted;
  for (const auto& u : r.units) {
    if (u.mode == ReasoningMode::Easy) {
      ++report.easy_units;
      report.compression_rejected += u.compression_rejected ? 1 : 0;
    } else {
      ++report.hard_units;
      report.entropy_only_hard_units += u.entropy_labeled ? 1 : 0;
    }
  }
  report.original_easy_tokens += r.original_easy_tokens;
  report.compressed_easy_tokens += r.compressed_easy_tokens;
  const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(std::floor(r.p_hard * 10.0)));
  ++report.p_hard_histogram[bin];
}

std::optional<double> corpus_threshold(const std::filesystem::path& input, const CuratorConfig& config) {
  std::ifstream in(input);
  std::vector<double> means;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    try {
      const auto source = source_record_from_json(nlohmann::json::parse(line));
      if (source.entropy_trace.empty()) continue;
      const auto spans = segment_cot_spans(source.cot, config.lexicon);
      for (const auto& m : unit_mean_entropies(source.cot, spans, source.entropy_trace)) {
        if (m) means.push_back(*m);
      }
    } catch (const std::exception&) {
      continue;
    }
  }
  return quantile(std::move(means), config.threshold_quantile);
}

void write_manifest(const std::filesystem::path& output, const std::filesystem::path& input, const std::string& status,
                    std::size_t written, const std::string& error) {
  std::ofstream m(output.string() + ".manifest.json");
  nlohmann::json j = {{"status", status}, {"input", input.string()}, {"output", output.string()},
                      {"records_written", written}};
  if (!error.empty()) j["error"] = error;
  m << j.dump(2) << '\n';
}

}  // namespace

CurationReport curate_corpus(const std::filesystem::path& input, const std::filesystem::path& output,
                             const CuratorConfig& config, const RewriterClient& client) {
  config.lexicon.validate();
  std::ifstream in(input);
  if (!in) {
    write_manifest(output, input, "partial", 0, "cannot open input");
    throw Error(ErrorCode::Io, "cannot open input " + input.string());
  }
  CurationReport report;
  report.entropy_threshold = config.entropy_threshold ? config.entropy_threshold : corpus_threshold(input, config);

  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) {
    write_manifest(output, input, "partial", 0, "cannot open output");
    throw Error(ErrorCode::Io, "cannot open output " + output.string());
  }

  const std::size_t workers = std::max<std::size_t>(1, config.jobs);
  const std::size_t batch_size = workers * 16;
  std::size_t line_no = 0;
  std::size_t written = 0;
  std::vector<std::string> batch;
  std::vector<LineOutcome> results;

  auto flush = [&] {
    results.assign(batch.size(), {});
    const std::size_t first_line = line_no - batch.size() + 1;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < batch.size(); i = next++) {
        results[i] = process_line(batch[i], first_line + i, config, client, report.entropy_threshold);
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < std::min(workers, batch.size()); ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    // Results land in input order regardless of which worker finished first.
    for (const auto& r : results) {
      tally(r, report);
      if (!r.outcome.record) continue;
      out << r.outcome.record->to_json().dump() << '\n';
      if (!out) {
        write_manifest(output, input, "partial", written, "write failed");
        throw Error(ErrorCode::Io, "write failed on " + output.string());
      }
      ++written;
    }
    batch.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    batch.push_back(std::move(line));
    if (batch.size() >= batch_size) flush();
  }
  if (in.bad()) {
    write_manifest(output, input, "partial", written, "read failed");
    throw Error(ErrorCode::Io, "read failed on " + input.string());
  }
  flush();
  out.flush();
  if (!out) {
    write_manifest(output, input, "partial", written, "flush failed");
    throw Error(ErrorCode::Io, "flush failed on " + output.string());
  }
  write_manifest(output, input, "complete", written, "");
  return report;
}

}  // namespace adr
