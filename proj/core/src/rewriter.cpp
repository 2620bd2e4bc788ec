#include "adr/rewriter.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adr/error.hpp"
#include "adr/text.hpp"
#include "http_client.hpp"

namespace adr {

namespace {

constexpr std::string_view kDefaultTemplate =
    "You rewrite one step of a math solution in a terse draft style.\n"
    "Keep every number, equation and conclusion from the step. Drop narration,\n"
    "hedging and restatements. Use as few words as possible. Do not add new\n"
    "reasoning, checks or commentary. Reply with the rewritten step only.\n"
    "\n"
    "Example step, verbose:\n"
    "{{example_original}}\n"
    "\n"
    "Same step, draft style:\n"
    "{{example_cod}}\n"
    "\n"
    "Step to rewrite:\n"
    "{{unit}}\n";

constexpr std::string_view kExampleOriginal =
    "Okay, so we need to find the sum of the roots. Let me recall that for a quadratic "
    "x^2 - 5x + 6 = 0, the sum of the roots is given by the negative of the coefficient of x "
    "divided by the leading coefficient. So that would be 5 divided by 1, which is 5.";

constexpr std::string_view kExampleCod = "Sum of roots of x^2 - 5x + 6: -(-5)/1 = 5.";

constexpr std::array<std::string_view, 14> kFillerOpeners = {
    "Let me think", "Let me see", "Let's see",   "Hmm",         "Okay",
    "OK,",          "Alright",    "So, let me", "I need to figure", "Let me start",
    "First, let me understand",   "Let me make sure I understand",   "Well,",
    "Now, let me think",
};

}  // namespace

PromptTemplate PromptTemplate::cod_shortening() {
  return {std::string(kDefaultTemplate), std::string(kExampleOriginal), std::string(kExampleCod)};
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open prompt template " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto t = cod_shortening();
  t.text = ss.str();
  return t;
}

std::string fill_slot(std::string text, std::string_view name, std::string_view value) {
  const std::string slot = "{{" + std::string(name) + "}}";
  std::size_t pos = text.find(slot);
  while (pos != std::string::npos) {
    text.replace(pos, slot.size(), value);
    pos = text.find(slot, pos + value.size());
  }
  return text;
}

std::string PromptTemplate::render(std::string_view unit) const {
  auto out = fill_slot(text, "example_original", example_original);
  out = fill_slot(std::move(out), "example_cod", example_cod);
  return fill_slot(std::move(out), "unit", unit);
}

std::uint64_t PromptTemplate::hash() const {
  auto h = fnv1a64(text);
  h = fnv1a64(example_original, h);
  return fnv1a64(example_cod, h);
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1]))) {
      const auto s = trim(text.substr(start, i + 1 - start));
      if (!s.empty()) out.emplace_back(s);
      start = i + 1;
    }
  }
  const auto tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

bool MockRewriter::is_filler(std::string_view sentence) {
  const auto s = trim(sentence);
  for (auto opener : kFillerOpeners) {
    if (s.starts_with(opener)) return true;
  }
  return false;
}

std::string MockRewriter::shorten(std::string_view unit_text, const PromptTemplate&) const {
  std::string out;
  for (const auto& s : split_sentences(unit_text)) {
    if (is_filler(s)) continue;
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

HttpRewriter::HttpRewriter(HttpRewriterConfig config) : config_(std::move(config)) {
  detail::split_url(config_.endpoint);
}

std::string HttpRewriter::shorten(std::string_view unit_text, const PromptTemplate& prompt) const {
  nlohmann::json body = {
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt.render(unit_text)}}})},
      {"temperature", 0},
  };
  if (!config_.model.empty()) body["model"] = config_.model;
  const auto response = detail::post_json(config_.endpoint, body, config_.auth_token,
                                          {config_.retries, config_.backoff_ms, config_.timeout_s});
  try {
    const auto& choice = response.at("choices").at(0);
    if (choice.contains("message")) return choice.at("message").at("content").get<std::string>();
    return choice.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ClientUnavailable, std::string("unexpected rewriter response: ") + e.what());
  }
}

CachedRewriter::CachedRewriter(std::shared_ptr<const RewriterClient> inner, std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachedRewriter::shorten(std::string_view unit_text, const PromptTemplate& prompt) const {
  const std::string key = hex64(fnv1a64(unit_text)) + ":" + hex64(prompt.hash());
  if (auto hit = cache_->get(key)) return *hit;
  auto out = inner_->shorten(unit_text, prompt);
  cache_->put(key, out);
  return out;
}

}  // namespace adr
