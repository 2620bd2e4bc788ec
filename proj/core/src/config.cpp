#include "adr/config.hpp"

#include <fstream>
#include <set>

#include "adr/error.hpp"

namespace adr {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out.reset();
  } else {
    out = obj.at(key).get<T>();
  }
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void RunConfig::validate() const {
  reward.validate();
  branch.validate();
  if (rollout.stage == Stage::Short8k && rollout.edr_enabled) {
    throw Error(ErrorCode::InvalidConfig, "stage 8k does not allow edr_enabled=true; EDR runs only in the 16k stage");
  }
  if (rollout.max_branches < 1) throw Error(ErrorCode::InvalidConfig, "rollout.max_branches must be >= 1");
  if (rollout.max_tokens && (*rollout.max_tokens < 1 || *rollout.max_tokens > stage_budget(rollout.stage))) {
    throw Error(ErrorCode::InvalidConfig, "rollout.max_tokens must lie in [1, stage budget]");
  }
  if (!(curator.threshold_quantile >= 0.0 && curator.threshold_quantile <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "curator.threshold_quantile must lie in [0, 1]");
  }
  if (curator.concurrency < 1) throw Error(ErrorCode::InvalidConfig, "curator.concurrency must be >= 1");
  if (curator.retries < 0) throw Error(ErrorCode::InvalidConfig, "curator.retries must be >= 0");
  if (!curator.mock && curator.endpoint.empty()) {
    throw Error(ErrorCode::InvalidConfig, "curator.mock=false needs curator.endpoint");
  }
}

std::size_t RunConfig::max_tokens() const { return rollout.max_tokens.value_or(stage_budget(rollout.stage)); }

RolloutConfig RunConfig::rollout_config(std::size_t jobs) const {
  RolloutConfig rc;
  rc.branch = branch;
  rc.max_tokens = max_tokens();
  rc.max_branches = rollout.max_branches;
  rc.edr_enabled = rollout.edr_enabled;
  rc.seed = rollout.seed;
  rc.jobs = jobs;
  return rc;
}

json RunConfig::to_json() const {
  json j;
  j["reward"] = {
      {"beta", reward.beta},
      {"lexicon", reward.lexicon.keywords},
      {"whole_word", reward.lexicon.whole_word},
      {"case_sensitive", reward.lexicon.case_sensitive},
      {"matcher", to_string(reward.answer_matcher)},
  };
  j["branch"] = {
      {"alpha", branch.alpha},
      {"k", branch.k},
      {"delta_cap", branch.delta_cap},
      {"refresh_h0", branch.refresh_h0},
  };
  j["rollout"] = {
      {"stage", to_string(rollout.stage)},
      {"edr_enabled", rollout.edr_enabled},
      {"max_branches", rollout.max_branches},
      {"seed", rollout.seed},
      {"max_tokens", optional_json(rollout.max_tokens)},
      {"endpoint", rollout.endpoint},
      {"model", rollout.model},
      {"top_logprobs", rollout.top_logprobs},
      {"temperature", rollout.temperature},
  };
  j["curator"] = {
      {"mock", curator.mock},
      {"endpoint", curator.endpoint},
      {"model", curator.model},
      {"entropy_threshold", optional_json(curator.entropy_threshold)},
      {"threshold_quantile", curator.threshold_quantile},
      {"concurrency", curator.concurrency},
      {"retries", curator.retries},
      {"prompt_template", curator.prompt_template},
      {"cache_path", curator.cache_path},
      {"gold_filter", curator.gold_filter},
  };
  j["paths"] = paths;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  try {
    reject_unknown(j, {"reward", "branch", "rollout", "curator", "paths"}, "config");
    if (j.contains("reward")) {
      const auto& r = j["reward"];
      reject_unknown(r, {"beta", "lexicon", "whole_word", "case_sensitive", "matcher"}, "reward");
      read(r, "beta", c.reward.beta);
      if (r.contains("lexicon")) c.reward.lexicon.keywords = r["lexicon"].get<std::set<std::string>>();
      read(r, "whole_word", c.reward.lexicon.whole_word);
      read(r, "case_sensitive", c.reward.lexicon.case_sensitive);
      if (r.contains("matcher")) {
        const auto m = parse_answer_matcher(r["matcher"].get<std::string>());
        if (!m) throw Error(ErrorCode::InvalidConfig, "reward.matcher must be 'exact' or 'exact_numeric'");
        c.reward.answer_matcher = *m;
      }
    }
    if (j.contains("branch")) {
      const auto& b = j["branch"];
      reject_unknown(b, {"alpha", "k", "delta_cap", "refresh_h0"}, "branch");
      read(b, "alpha", c.branch.alpha);
      read(b, "k", c.branch.k);
      // delta_cap follows alpha unless set explicitly.
      c.branch.delta_cap = 1.0 - c.branch.alpha;
      read(b, "delta_cap", c.branch.delta_cap);
      read(b, "refresh_h0", c.branch.refresh_h0);
    }
    if (j.contains("rollout")) {
      const auto& r = j["rollout"];
      reject_unknown(r, {"stage", "edr_enabled", "max_branches", "seed", "max_tokens", "endpoint", "model",
                         "top_logprobs", "temperature"},
                     "rollout");
      if (r.contains("stage")) {
        const auto s = parse_stage(r["stage"].get<std::string>());
        if (!s) throw Error(ErrorCode::InvalidConfig, "rollout.stage must be '8k' or '16k'");
        c.rollout.stage = *s;
      }
      read(r, "edr_enabled", c.rollout.edr_enabled);
      read(r, "max_branches", c.rollout.max_branches);
      read(r, "seed", c.rollout.seed);
      read_optional(r, "max_tokens", c.rollout.max_tokens);
      read(r, "endpoint", c.rollout.endpoint);
      read(r, "model", c.rollout.model);
      read(r, "top_logprobs", c.rollout.top_logprobs);
      read(r, "temperature", c.rollout.temperature);
    }
    if (j.contains("curator")) {
      const auto& r = j["curator"];
      reject_unknown(r, {"mock", "endpoint", "model", "entropy_threshold", "threshold_quantile", "concurrency",
                         "retries", "prompt_template", "cache_path", "gold_filter"},
                     "curator");
      read(r, "mock", c.curator.mock);
      read(r, "endpoint", c.curator.endpoint);
      read(r, "model", c.curator.model);
      read_optional(r, "entropy_threshold", c.curator.entropy_threshold);
      read(r, "threshold_quantile", c.curator.threshold_quantile);
      read(r, "concurrency", c.curator.concurrency);
      read(r, "retries", c.curator.retries);
      read(r, "prompt_template", c.curator.prompt_template);
      read(r, "cache_path", c.curator.cache_path);
      read(r, "gold_filter", c.curator.gold_filter);
    }
    if (j.contains("paths")) c.paths = j["paths"].get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write config " + path.string());
  out << config.to_json().dump(2) << '\n';
}

}  // namespace adr
