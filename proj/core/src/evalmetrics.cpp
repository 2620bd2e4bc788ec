#include "adr/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "adr/error.hpp"
#include "adr/text.hpp"

namespace adr {

void MethodResult::validate() const {
  if (!(accuracy_pct >= 0.0 && accuracy_pct <= 100.0)) {
    throw Error(ErrorCode::InvalidArgument, method + ": accuracy_pct outside [0, 100]");
  }
  if (!(mean_tokens >= 0.0)) throw Error(ErrorCode::InvalidArgument, method + ": negative mean_tokens");
}

double pass_at_1(std::span<const std::vector<bool>> correctness, std::size_t n_samples) {
  if (correctness.empty()) throw Error(ErrorCode::InvalidArgument, "no problems");
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be positive");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < correctness.size(); ++i) {
    if (correctness[i].size() != n_samples) {
      throw Error(ErrorCode::SampleCountMismatch, "problem " + std::to_string(i) + " has " +
                                                      std::to_string(correctness[i].size()) + " samples, expected " +
                                                      std::to_string(n_samples));
    }
    correct += static_cast<std::size_t>(std::count(correctness[i].begin(), correctness[i].end(), true));
  }
  return static_cast<double>(correct) / static_cast<double>(correctness.size() * n_samples);
}

double aes(double acc, double acc_base, double tokens, double tokens_base) {
  if (!(acc_base > 0.0) || !(tokens_base > 0.0)) {
    throw Error(ErrorCode::DivisionDomain, "baseline accuracy and tokens must be positive");
  }
  const double length_gain = (tokens_base - tokens) / tokens_base;
  const double acc_change = (acc - acc_base) / acc_base;
  const double weight = acc >= acc_base ? 3.0 : 5.0;
  return length_gain + weight * acc_change;
}

double token_reduction_pct(double tokens, double tokens_base) {
  if (!(tokens_base > 0.0)) throw Error(ErrorCode::DivisionDomain, "baseline tokens must be positive");
  return 100.0 * (tokens_base - tokens) / tokens_base;
}

void BenchmarkTable::add(const std::string& benchmark, const MethodResult& result, bool is_baseline) {
  result.validate();
  if (std::find(benchmarks.begin(), benchmarks.end(), benchmark) == benchmarks.end()) benchmarks.push_back(benchmark);
  if (is_baseline) {
    baseline[benchmark] = result;
    return;
  }
  auto it = std::find_if(methods.begin(), methods.end(), [&](const auto& m) { return m.first == result.method; });
  if (it == methods.end()) {
    methods.emplace_back(result.method, std::map<std::string, MethodResult>{});
    it = std::prev(methods.end());
  }
  it->second[benchmark] = result;
}

AesReport build_report(const BenchmarkTable& table) {
  AesReport report;
  for (const auto& b : table.benchmarks) {
    const auto base = table.baseline.find(b);
    if (base != table.baseline.end()) {
      report.benchmarks.push_back(b);
      report.baseline.push_back(base->second);
    }
  }
  for (const auto& [method, cells] : table.methods) {
    for (const auto& [benchmark, _] : cells) {
      if (!table.baseline.count(benchmark)) {
        throw Error(ErrorCode::MissingBaseline, method + " reports " + benchmark + " but the baseline does not");
      }
    }
    MethodRow row;
    row.method = method;
    double sum = 0.0;
    for (std::size_t i = 0; i < report.benchmarks.size(); ++i) {
      AesCell cell;
      cell.benchmark = report.benchmarks[i];
      const auto it = cells.find(cell.benchmark);
      if (it != cells.end()) {
        const auto& base = report.baseline[i];
        cell.result = it->second;
        cell.token_reduction_pct = token_reduction_pct(it->second.mean_tokens, base.mean_tokens);
        cell.aes = aes(it->second.accuracy_pct, base.accuracy_pct, it->second.mean_tokens, base.mean_tokens);
        sum += *cell.aes;
        ++row.reported_cells;
      }
      row.cells.push_back(std::move(cell));
    }
    if (row.reported_cells > 0) row.avg_aes = sum / static_cast<double>(row.reported_cells);
    report.rows.push_back(std::move(row));
  }
  return report;
}

const MethodRow* AesReport::find(const std::string& method) const {
  for (const auto& r : rows) {
    if (r.method == method) return &r;
  }
  return nullptr;
}

std::string format_fixed(double value, int decimals) {
  // Avoid printing "-0.00" for values that round to zero.
  const double scale = std::pow(10.0, decimals);
  double rounded = std::round(value * scale) / scale;
  if (rounded == 0.0) rounded = 0.0;
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << rounded;
  return os.str();
}

std::string AesReport::render_table() const {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"Method"};
  for (const auto& b : benchmarks) {
    header.push_back(b + " Acc.");
    header.push_back(b + " Tokens");
    header.push_back(b + " AES");
  }
  header.push_back("Avg. AES");
  grid.push_back(header);

  std::vector<std::string> base_row{"Baseline"};
  for (const auto& b : baseline) {
    base_row.push_back(format_fixed(b.accuracy_pct, 1));
    base_row.push_back(format_fixed(b.mean_tokens, 0));
    base_row.push_back("---");
  }
  base_row.push_back("---");
  grid.push_back(base_row);

  for (const auto& row : rows) {
    std::vector<std::string> line{row.method};
    for (const auto& c : row.cells) {
      if (!c.result) {
        line.insert(line.end(), {"---", "---", "---"});
        continue;
      }
      line.push_back(format_fixed(c.result->accuracy_pct, 1));
      const double red = *c.token_reduction_pct;
      line.push_back(format_fixed(c.result->mean_tokens, 0) + (red >= 0 ? " (-" : " (+") +
                     format_fixed(std::abs(red), 1) + "%)");
      line.push_back(format_fixed(*c.aes, 2));
    }
    line.push_back(row.avg_aes ? format_fixed(*row.avg_aes, 2) : "---");
    grid.push_back(line);
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : grid) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream os;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t i = 0; i < grid[r].size(); ++i) {
      if (i == 0) {
        os << std::left << std::setw(static_cast<int>(width[i])) << grid[r][i];
      } else {
        os << "  " << std::right << std::setw(static_cast<int>(width[i])) << grid[r][i];
      }
    }
    os << '\n';
    if (r == 0) {
      const std::size_t total = std::accumulate(width.begin(), width.end(), std::size_t{0}) + 2 * (width.size() - 1);
      os << std::string(total, '-') << '\n';
    }
  }
  return os.str();
}

nlohmann::json AesReport::to_json() const {
  nlohmann::json j;
  j["benchmarks"] = benchmarks;
  j["token_convention"] = token_convention;
  auto& base = j["baseline"] = nlohmann::json::object();
  for (std::size_t i = 0; i < benchmarks.size(); ++i) {
    base[benchmarks[i]] = {{"accuracy_pct", baseline[i].accuracy_pct}, {"mean_tokens", baseline[i].mean_tokens}};
  }
  auto& methods = j["methods"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json m = {{"method", row.method}, {"reported_cells", row.reported_cells}};
    m["avg_aes"] = row.avg_aes ? nlohmann::json(*row.avg_aes) : nlohmann::json(nullptr);
    auto& cells = m["cells"] = nlohmann::json::object();
    for (const auto& c : row.cells) {
      if (!c.result) {
        cells[c.benchmark] = nullptr;
        continue;
      }
      cells[c.benchmark] = {{"accuracy_pct", c.result->accuracy_pct},
                            {"mean_tokens", c.result->mean_tokens},
                            {"token_reduction_pct", *c.token_reduction_pct},
                            {"aes", *c.aes}};
    }
    methods.push_back(std::move(m));
  }
  return j;
}

nlohmann::json AesReport::plot_data() const {
  auto out = nlohmann::json::array();
  for (const auto& row : rows) {
    for (const auto& c : row.cells) {
      if (!c.result) continue;
      out.push_back({{"method", row.method},
                     {"benchmark", c.benchmark},
                     {"acc", c.result->accuracy_pct},
                     {"tokens", c.result->mean_tokens},
                     {"aes", *c.aes}});
    }
  }
  return out;
}

BenchmarkTable load_eval_jsonl(std::istream& in, const std::string& baseline_method, std::size_t n_samples) {
  struct RawCell {
    std::map<std::string, std::vector<bool>> correct_by_problem;
    double token_sum = 0.0;
    std::size_t samples = 0;
  };
  BenchmarkTable table;
  std::vector<std::pair<std::string, std::string>> raw_order;
  std::map<std::pair<std::string, std::string>, RawCell> raw;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      const auto benchmark = j.at("benchmark").get<std::string>();
      const auto method = j.at("method").get<std::string>();
      if (j.contains("accuracy_pct")) {
        MethodResult r{method, j.at("accuracy_pct").get<double>(), j.at("mean_tokens").get<double>()};
        table.add(benchmark, r, method == baseline_method);
        continue;
      }
      const auto key = std::make_pair(benchmark, method);
      if (!raw.count(key)) raw_order.push_back(key);
      auto& cell = raw[key];
      const auto& pid = j.at("problem_id");
      cell.correct_by_problem[pid.is_string() ? pid.get<std::string>() : pid.dump()].push_back(
          j.at("correct").get<bool>());
      cell.token_sum += j.at("tokens").get<double>();
      ++cell.samples;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "eval input line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& key : raw_order) {
    const auto& cell = raw[key];
    std::vector<std::vector<bool>> per_problem;
    for (const auto& [_, v] : cell.correct_by_problem) per_problem.push_back(v);
    MethodResult r;
    r.method = key.second;
    r.accuracy_pct = 100.0 * pass_at_1(per_problem, n_samples);
    r.mean_tokens = cell.token_sum / static_cast<double>(cell.samples);
    table.add(key.first, r, key.second == baseline_method);
  }
  return table;
}

}  // namespace adr
