#include "adr/cache.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "adr/error.hpp"
#include "adr/text.hpp"

namespace adr {

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(*file_);
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      entries_[j.at("key").get<std::string>()] = j.at("value").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      // A torn final line from an interrupted run; skip it.
    }
  }
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, const std::string& value) {
  std::lock_guard lock(mu_);
  entries_[key] = value;
  if (!file_) return;
  std::ofstream out(*file_, std::ios::app);
  if (!out) throw Error(ErrorCode::Io, "cannot append to cache " + file_->string());
  out << nlohmann::json{{"key", key}, {"value", value}}.dump() << '\n';
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

}  // namespace adr
