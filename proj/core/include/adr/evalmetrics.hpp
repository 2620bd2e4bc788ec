#pragma once

// Accuracy/efficiency bookkeeping.
//
//   AES = (T_base - T) / T_base + k * (A - A_base) / A_base,  k = 3 if A >= A_base else 5
//
// Averages skip cells a method does not report.

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace adr {

struct MethodResult {
  std::string method;
  double accuracy_pct = 0.0;
  double mean_tokens = 0.0;

  void validate() const;
};

// Mean correctness over every sample of every problem. Throws
// Error(SampleCountMismatch) if a problem does not have exactly n_samples.
double pass_at_1(std::span<const std::vector<bool>> correctness, std::size_t n_samples = 16);

// Throws Error(DivisionDomain) unless both baselines are positive.
double aes(double acc, double acc_base, double tokens, double tokens_base);

// 100 * (T_base - T) / T_base
double token_reduction_pct(double tokens, double tokens_base);

// Table layout: one baseline and any number of methods, each possibly
// missing some benchmarks.
struct BenchmarkTable {
  std::vector<std::string> benchmarks;
  std::map<std::string, MethodResult> baseline;
  std::vector<std::pair<std::string, std::map<std::string, MethodResult>>> methods;

  void add(const std::string& benchmark, const MethodResult& result, bool is_baseline);
};

struct AesCell {
  std::string benchmark;
  std::optional<MethodResult> result;
  std::optional<double> token_reduction_pct;
  std::optional<double> aes;
};

struct MethodRow {
  std::string method;
  std::vector<AesCell> cells;
  std::optional<double> avg_aes;
  std::size_t reported_cells = 0;
};

struct AesReport {
  std::vector<std::string> benchmarks;
  std::vector<MethodResult> baseline;  // parallel to benchmarks
  std::vector<MethodRow> rows;
  std::string token_convention = "as_supplied";

  const MethodRow* find(const std::string& method) const;
  std::string render_table() const;
  nlohmann::json to_json() const;
  // (method, benchmark, acc, tokens, aes) tuples for plotting.
  nlohmann::json plot_data() const;
};

// Throws Error(MissingBaseline) when a method reports a benchmark the
// baseline does not.
AesReport build_report(const BenchmarkTable& table);

// Reads aggregate lines {"benchmark","method","accuracy_pct","mean_tokens"}
// and raw per-sample lines {"benchmark","method","problem_id","sample_id",
// "correct","tokens"}; raw lines are reduced to pass@1 and mean tokens.
BenchmarkTable load_eval_jsonl(std::istream& in, const std::string& baseline_method, std::size_t n_samples = 16);

// Formats for display: one decimal for reductions, two for AES.
std::string format_fixed(double value, int decimals);

}  // namespace adr
