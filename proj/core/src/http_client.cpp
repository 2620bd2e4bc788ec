#include "http_client.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "adr/error.hpp"

namespace adr::detail {

HttpTarget split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || scheme_end + 3 >= url.size()) {
    throw Error(ErrorCode::InvalidConfig, "endpoint must be an absolute URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const std::string& auth_token,
                         const HttpRetryPolicy& policy) {
  const auto target = split_url(url);
  httplib::Client client(target.origin);
  client.set_connection_timeout(policy.timeout_s, 0);
  client.set_read_timeout(policy.timeout_s, 0);
  httplib::Headers headers;
  if (!auth_token.empty()) headers.emplace("Authorization", "Bearer " + auth_token);

  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= policy.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(policy.backoff_ms << (attempt - 1)));
    }
    auto res = client.Post(target.path, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorCode::ClientUnavailable, url + " returned HTTP " + std::to_string(res->status));
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ClientUnavailable, url + " returned malformed JSON: " + e.what());
    }
  }
  throw Error(ErrorCode::ClientUnavailable,
              url + " unavailable after " + std::to_string(policy.retries + 1) + " attempts: " + last_error);
}

}  // namespace adr::detail
