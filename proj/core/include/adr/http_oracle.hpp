#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "adr/cache.hpp"
#include "adr/rollout.hpp"

namespace adr {

struct HttpOracleConfig {
  // Full URL of an OpenAI-style /v1/completions endpoint.
  std::string endpoint;
  std::string auth_token;
  std::string model;
  std::size_t top_logprobs = 20;
  double temperature = 1.0;
  int retries = 3;
  int backoff_ms = 200;
  int timeout_s = 60;
};

// Requests one token per step with top-k logprobs. The prompt sent is the
// concatenated context; responses are cached by (context hash, seed), where
// the seed is drawn from the node's rng stream.
class HttpCompletionOracle final : public GeneratorOracle {
 public:
  explicit HttpCompletionOracle(HttpOracleConfig config, std::shared_ptr<ResponseCache> cache = nullptr);

  OracleStep step(const GenerationContext& context, CounterRng& rng) const override;
  bool is_terminal(const GenerationContext& context) const override;

 private:
  HttpOracleConfig config_;
  std::shared_ptr<ResponseCache> cache_;
};

}  // namespace adr
