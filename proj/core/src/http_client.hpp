#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace adr::detail {

struct HttpTarget {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

// Throws Error(InvalidConfig) for a URL without scheme or host.
HttpTarget split_url(const std::string& url);

struct HttpRetryPolicy {
  int retries = 3;
  int backoff_ms = 200;
  int timeout_s = 60;
};

// POSTs a JSON body and returns the parsed JSON response. Connection errors,
// 429 and 5xx are retried with exponential backoff; anything else fails
// immediately. Throws Error(ClientUnavailable) once retries are exhausted.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const std::string& auth_token,
                         const HttpRetryPolicy& policy);

}  // namespace adr::detail
