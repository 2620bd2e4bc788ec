#include <iostream>

#include <CLI11.hpp>

#include "adr/error.hpp"
#include "commands.hpp"

using namespace adr::cli;

namespace {

int exit_code_for(adr::ErrorCode code) {
  switch (code) {
    case adr::ErrorCode::InvalidConfig: return kConfigError;
    case adr::ErrorCode::Io: return kIoError;
    case adr::ErrorCode::ClientUnavailable:
    case adr::ErrorCode::OracleFailure: return kClientError;
    default: return kValidationFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid fast/slow reasoning toolkit: trace validation, reward scoring, entropy-guided rollout, "
               "data curation and accuracy/efficiency evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "JSON run configuration (merged over defaults)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Override rollout.seed");
  app.add_option("--stage", g.stage, "Training stage budget")->check(CLI::IsMember({"8k", "16k"}));
  app.add_flag("--edr", g.force_edr, "Enable entropy-guided branching (16k stage only)");
  app.add_flag("--mock", g.mock, "Use the offline mock rewriter");
  app.add_option("--endpoint", g.endpoint, "Live completion endpoint URL (token from $ADR_API_TOKEN)");

  ValidateOptions vo;
  auto* validate = app.add_subcommand("validate", "Parse and validate hybrid traces");
  validate->add_option("--in", vo.in, "JSONL with trace_text, or raw text with one trace per line")->required();
  validate->add_option("--out", vo.out, "Write per-line reports here instead of stdout");
  validate->add_option("--format", vo.format, "Input format")->check(CLI::IsMember({"auto", "jsonl", "text"}));

  ScoreOptions so;
  auto* score = app.add_subcommand("score", "Group-aware reward scoring");
  score->add_option("--in", so.in, "JSONL {trace_text, gold_answer, group_id}")->required();
  score->add_option("--out", so.out, "Output JSONL (stdout if omitted)");

  RolloutOptions ro;
  auto* rollout = app.add_subcommand("rollout", "Entropy-guided dynamic rollout");
  rollout->add_option("--script", ro.script, "Scripted oracle JSONL");
  rollout->add_option("--prompt", ro.prompt, "Prompt text");
  rollout->add_option("--problem", ro.problem, "Problem text filled into --prompt-template");
  rollout->add_option("--prompt-template", ro.prompt_template, "Template with a {{problem}} slot");
  rollout->add_option("--gold", ro.gold, "Gold answer; adds per-node rewards and the selected node");
  rollout->add_option("--out", ro.out, "Tree dump path (stdout if omitted)");
  rollout->add_option("--cache", ro.cache, "Response cache file for live endpoints");
  rollout->add_option("--runs", ro.runs, "Independent rollouts with seeds seed..seed+runs-1 (JSONL output)")
      ->check(CLI::PositiveNumber);

  CurateOptions co;
  auto* curate = app.add_subcommand("curate", "Build hybrid traces from a CoT corpus");
  curate->add_option("--in", co.in, "Input JSONL {id, problem, cot, answer[, entropy_trace]}")->required();
  curate->add_option("--out", co.out, "Output JSONL")->required();
  curate->add_option("--lexicon", co.lexicon, "Comma-separated keywords or a file with one per line");
  curate->add_option("--entropy-threshold", co.entropy_threshold, "Unit-mean entropy above which a unit is hard");
  curate->add_option("--cache", co.cache, "Rewriter response cache file");
  curate->add_option("--template", co.prompt_template, "Shortening prompt template file");

  EntropyOptions eo;
  auto* entropy = app.add_subcommand("entropy", "Unit-boundary entropy analysis");
  entropy->add_option("--in", eo.in, "JSONL token events {token, top_logprobs[, trace_id]}")->required();
  entropy->add_option("--out", eo.out, "Output JSONL (stdout if omitted)");
  entropy->add_option("--k", eo.k, "Window length in tokens (default branch.k)")->check(CLI::PositiveNumber);

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "pass@1, token reduction and AES report");
  eval->add_option("--in", ev.in, "Aggregate or per-sample JSONL")->required();
  eval->add_option("--out", ev.out, "JSON report path");
  eval->add_option("--baseline", ev.baseline, "Method name of the baseline rows");
  eval->add_option("--samples", ev.samples, "Samples per problem for pass@1")->check(CLI::PositiveNumber);
  eval->add_option("--emit-plot-data", ev.plot_data, "Write (method, benchmark, acc, tokens, aes) tuples");
  eval->add_option("--token-convention", ev.token_convention, "Recorded in the report, e.g. with_answer");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*validate) return cmd_validate(g, vo);
    if (*score) return cmd_score(g, so);
    if (*rollout) return cmd_rollout(g, ro);
    if (*curate) return cmd_curate(g, co);
    if (*entropy) return cmd_entropy(g, eo);
    if (*eval) return cmd_eval(g, ev);
  } catch (const adr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationFailed;
  }
  return kOk;
}
