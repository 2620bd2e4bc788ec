#include "adr/http_oracle.hpp"

#include <nlohmann/json.hpp>

#include "adr/error.hpp"
#include "http_client.hpp"

namespace adr {

HttpCompletionOracle::HttpCompletionOracle(HttpOracleConfig config, std::shared_ptr<ResponseCache> cache)
    : config_(std::move(config)), cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()) {
  detail::split_url(config_.endpoint);
}

OracleStep HttpCompletionOracle::step(const GenerationContext& context, CounterRng& rng) const {
  std::string prompt;
  for (const auto& t : context.prompt) prompt += t;
  for (const auto& t : context.generated) prompt += t;
  const auto seed = static_cast<std::int64_t>(rng.next_u64() & 0x7fffffffULL);
  const std::string key = hex64(fnv1a64(prompt)) + ":" + std::to_string(seed);

  nlohmann::json choice;
  if (auto hit = cache_->get(key)) {
    choice = nlohmann::json::parse(*hit);
  } else {
    nlohmann::json body = {
        {"prompt", prompt},
        {"max_tokens", 1},
        {"logprobs", config_.top_logprobs},
        {"temperature", config_.temperature},
        {"seed", seed},
    };
    if (!config_.model.empty()) body["model"] = config_.model;
    const auto response =
        detail::post_json(config_.endpoint, body, config_.auth_token,
                          {config_.retries, config_.backoff_ms, config_.timeout_s});
    try {
      choice = response.at("choices").at(0);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::OracleFailure, std::string("completion response has no choices: ") + e.what());
    }
    cache_->put(key, choice.dump());
  }

  OracleStep out;
  out.token_text = choice.value("text", "");
  if (out.token_text.empty()) return out;

  std::vector<std::pair<std::string, double>> top;
  if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
    const auto& lp = choice["logprobs"];
    if (lp.contains("top_logprobs") && lp["top_logprobs"].is_array() && !lp["top_logprobs"].empty()) {
      for (const auto& [tok, value] : lp["top_logprobs"][0].items()) top.emplace_back(tok, value.get<double>());
    }
  }
  if (top.empty()) {
    out.probs = {1.0};
  } else {
    out.probs = token_event_from_logprobs(out.token_text, top).probs;
  }
  return out;
}

bool HttpCompletionOracle::is_terminal(const GenerationContext&) const { return false; }

}  // namespace adr
