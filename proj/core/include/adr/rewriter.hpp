#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adr/cache.hpp"

namespace adr {

// Prompt text with {{slot}} placeholders. The shortening template uses
// {{unit}}, {{example_original}} and {{example_cod}}.
struct PromptTemplate {
  std::string text;
  std::string example_original;
  std::string example_cod;

  static PromptTemplate cod_shortening();
  static PromptTemplate load(const std::filesystem::path& path);

  std::string render(std::string_view unit) const;
  std::uint64_t hash() const;
};

// Fills every {{name}} occurrence; unknown slots are left untouched.
std::string fill_slot(std::string text, std::string_view name, std::string_view value);

class RewriterClient {
 public:
  virtual ~RewriterClient() = default;
  // Safe to call concurrently. Throws Error(ClientUnavailable) when the
  // backend cannot be reached after retries.
  virtual std::string shorten(std::string_view unit_text, const PromptTemplate& prompt) const = 0;
};

// Offline stand-in: drops sentences that open with a hedging phrase and
// joins the rest with single spaces. Fully deterministic.
class MockRewriter final : public RewriterClient {
 public:
  std::string shorten(std::string_view unit_text, const PromptTemplate& prompt) const override;

  static bool is_filler(std::string_view sentence);
};

struct HttpRewriterConfig {
  // OpenAI-style /v1/chat/completions URL.
  std::string endpoint;
  std::string auth_token;
  std::string model;
  int retries = 3;
  int backoff_ms = 500;
  int timeout_s = 120;
};

class HttpRewriter final : public RewriterClient {
 public:
  explicit HttpRewriter(HttpRewriterConfig config);
  std::string shorten(std::string_view unit_text, const PromptTemplate& prompt) const override;

 private:
  HttpRewriterConfig config_;
};

// Memoizes another client by (unit hash, template hash).
class CachedRewriter final : public RewriterClient {
 public:
  CachedRewriter(std::shared_ptr<const RewriterClient> inner, std::shared_ptr<ResponseCache> cache);
  std::string shorten(std::string_view unit_text, const PromptTemplate& prompt) const override;

 private:
  std::shared_ptr<const RewriterClient> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

// Splits after '.', '!' or '?' followed by whitespace.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace adr
