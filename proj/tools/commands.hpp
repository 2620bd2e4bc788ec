#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "adr/config.hpp"

namespace adr::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kConfigError = 2,
  kIoError = 3,
  kClientError = 4,
};

struct GlobalOptions {
  std::string config_path;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string stage;
  bool mock = false;
  std::string endpoint;
  bool force_edr = false;
};

struct ValidateOptions {
  std::string in;
  std::string out;
  std::string format = "auto";
};

struct ScoreOptions {
  std::string in;
  std::string out;
};

struct RolloutOptions {
  std::string script;
  std::string prompt;
  std::string problem;
  std::string prompt_template;
  std::string gold;
  std::string out;
  std::string cache;
  std::size_t runs = 1;
};

struct CurateOptions {
  std::string in;
  std::string out;
  std::string lexicon;
  std::optional<double> entropy_threshold;
  std::string cache;
  std::string prompt_template;
};

struct EntropyOptions {
  std::string in;
  std::string out;
  std::optional<std::size_t> k;
};

struct EvalOptions {
  std::string in;
  std::string out;
  std::string baseline = "Baseline";
  std::size_t samples = 16;
  std::string plot_data;
  std::string token_convention = "as_supplied";
};

// Defaults, then --config, then command-line overrides; validated.
RunConfig resolve_config(const GlobalOptions& g);

int cmd_validate(const GlobalOptions& g, const ValidateOptions& o);
int cmd_score(const GlobalOptions& g, const ScoreOptions& o);
int cmd_rollout(const GlobalOptions& g, const RolloutOptions& o);
int cmd_curate(const GlobalOptions& g, const CurateOptions& o);
int cmd_entropy(const GlobalOptions& g, const EntropyOptions& o);
int cmd_eval(const GlobalOptions& g, const EvalOptions& o);

}  // namespace adr::cli
