#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "adr/entropy.hpp"
#include "adr/reward.hpp"
#include "adr/rollout.hpp"

namespace adr {

// Environment variable holding the bearer token for live endpoints.
inline constexpr const char* kAuthTokenEnv = "ADR_API_TOKEN";

struct RolloutSettings {
  Stage stage = Stage::Long16k;
  bool edr_enabled = true;
  std::size_t max_branches = 4;
  std::uint64_t seed = 0;
  // Defaults to the stage budget; may only tighten it.
  std::optional<std::size_t> max_tokens;
  std::string endpoint;
  std::string model;
  std::size_t top_logprobs = 20;
  double temperature = 1.0;
};

struct CuratorSettings {
  bool mock = true;
  std::string endpoint;
  std::string model;
  std::optional<double> entropy_threshold;
  double threshold_quantile = 0.75;
  std::size_t concurrency = 4;
  int retries = 3;
  std::string prompt_template;
  std::string cache_path;
  bool gold_filter = false;
};

// Effective configuration of a run. Loading merges a partial document over
// the defaults; unknown keys are rejected.
struct RunConfig {
  RewardConfig reward;
  BranchConfig branch;
  RolloutSettings rollout;
  CuratorSettings curator;
  std::map<std::string, std::string> paths;

  // Throws Error(InvalidConfig). An 8k stage may not enable EDR.
  void validate() const;

  std::size_t max_tokens() const;
  RolloutConfig rollout_config(std::size_t jobs = 1) const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace adr
