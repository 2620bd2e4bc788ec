#include "commands.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "adr/adr.hpp"

namespace adr::cli {

namespace {

using nlohmann::json;

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw Error(ErrorCode::Io, "cannot open output " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open input " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read failed on " + path);
  return lines;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_effective_config(const RunConfig& cfg, const std::string& out_path) {
  if (out_path.empty()) return;
  save_run_config(cfg, out_path + ".config.json");
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string auth_token() {
  const char* t = std::getenv(kAuthTokenEnv);
  return t ? t : "";
}

json parse_json_line(const std::string& line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::string group_key(const json& id) { return id.is_string() ? id.get<std::string>() : id.dump(); }

KeywordLexicon lexicon_from_option(const std::string& arg, const KeywordLexicon& base) {
  std::vector<std::string> words;
  std::ifstream file(arg);
  if (file) {
    std::string line;
    while (std::getline(file, line)) {
      const auto w = trim(line);
      if (!w.empty() && !w.starts_with("#")) words.emplace_back(w);
    }
  } else {
    std::stringstream ss(arg);
    std::string w;
    while (std::getline(ss, w, ',')) {
      if (!trim(w).empty()) words.emplace_back(trim(w));
    }
  }
  auto lex = base;
  lex.keywords = std::set<std::string>(words.begin(), words.end());
  lex.validate();
  return lex;
}

}  // namespace

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
  if (g.seed) cfg.rollout.seed = *g.seed;
  if (g.stage == "8k") {
    // Selecting the short stage turns EDR off unless --edr insists, which validate() rejects.
    cfg.rollout.stage = Stage::Short8k;
    cfg.rollout.edr_enabled = g.force_edr;
  } else if (g.stage == "16k") {
    cfg.rollout.stage = Stage::Long16k;
  }
  if (g.force_edr) cfg.rollout.edr_enabled = true;
  if (!g.endpoint.empty()) {
    cfg.curator.endpoint = g.endpoint;
    cfg.curator.mock = false;
    cfg.rollout.endpoint = g.endpoint;
  }
  if (g.mock) cfg.curator.mock = true;
  cfg.validate();
  return cfg;
}

int cmd_validate(const GlobalOptions& g, const ValidateOptions& o) {
  (void)g;
  const auto lines = read_lines(o.in);
  bool jsonl = o.format == "jsonl";
  if (o.format == "auto") {
    jsonl = o.in.ends_with(".jsonl");
    for (const auto& l : lines) {
      if (is_blank(l)) continue;
      jsonl = jsonl || trim(l).starts_with("{");
      break;
    }
  }
  Output out(o.out);
  std::size_t checked = 0;
  std::size_t invalid = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    ++checked;
    json record = {{"line", i + 1}};
    std::string text;
    if (jsonl) {
      try {
        text = json::parse(lines[i]).at("trace_text").get<std::string>();
      } catch (const json::exception& e) {
        record["ok"] = false;
        record["error"] = std::string("unreadable line: ") + e.what();
        ++invalid;
        out.stream() << record.dump() << '\n';
        continue;
      }
    } else {
      text = lines[i];
    }
    const auto report = parse_trace(text);
    record.update(to_json(report));
    if (!report.ok) ++invalid;
    out.stream() << record.dump() << '\n';
  }
  if (checked == 0) {
    std::cerr << "warning: no traces in " << o.in << '\n';
    return kOk;
  }
  std::cerr << "checked " << checked << " traces, " << invalid << " invalid\n";
  return invalid == 0 ? kOk : kValidationFailed;
}

int cmd_score(const GlobalOptions& g, const ScoreOptions& o) {
  const auto cfg = resolve_config(g);
  const auto lines = read_lines(o.in);

  struct Item {
    json group_id;
    std::string trace_text;
    std::string gold;
    std::size_t group = 0;
    std::size_t index = 0;
  };
  std::vector<Item> items;
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const auto j = parse_json_line(lines[i], i + 1);
    Item item;
    try {
      item.group_id = j.at("group_id");
      item.trace_text = j.at("trace_text").get<std::string>();
      item.gold = j.at("gold_answer").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(i + 1) + ": " + e.what());
    }
    const auto key = group_key(item.group_id);
    auto [it, fresh] = group_of.emplace(key, groups.size());
    if (fresh) groups.emplace_back();
    item.group = it->second;
    item.index = groups[item.group].size();
    groups[item.group].push_back(items.size());
    items.push_back(std::move(item));
  }

  std::vector<ScoredSample> scored(items.size());
  parallel_for(groups.size(), g.jobs, [&](std::size_t gi) {
    std::vector<GroupSample> samples;
    for (auto idx : groups[gi]) samples.push_back(make_group_sample(items[idx].trace_text, items[idx].gold, cfg.reward));
    const auto result = score_group(samples, cfg.reward);
    for (std::size_t k = 0; k < result.size(); ++k) scored[groups[gi][k]] = result[k];
  });

  Output out(o.out);
  for (std::size_t i = 0; i < items.size(); ++i) {
    json rec = {{"group_id", items[i].group_id}, {"index", items[i].index}};
    rec.update(to_json(scored[i].reward));
    rec["advantage"] = scored[i].advantage;
    out.stream() << rec.dump() << '\n';
  }
  for (const auto& grp : groups) {
    if (grp.size() == 1) {
      std::cerr << "warning: group " << group_key(items[grp[0]].group_id)
                << " has a single member; its advantage is 0\n";
    }
  }
  write_effective_config(cfg, o.out);
  return kOk;
}

int cmd_rollout(const GlobalOptions& g, const RolloutOptions& o) {
  const auto cfg = resolve_config(g);

  std::unique_ptr<GeneratorOracle> oracle;
  if (!o.script.empty()) {
    oracle = load_scripted_oracle(o.script);
  } else if (!cfg.rollout.endpoint.empty()) {
    HttpOracleConfig hc;
    hc.endpoint = cfg.rollout.endpoint;
    hc.auth_token = auth_token();
    hc.model = cfg.rollout.model;
    hc.top_logprobs = cfg.rollout.top_logprobs;
    hc.temperature = cfg.rollout.temperature;
    auto cache = o.cache.empty() ? std::make_shared<ResponseCache>() : std::make_shared<ResponseCache>(o.cache);
    oracle = std::make_unique<HttpCompletionOracle>(hc, cache);
  } else {
    throw Error(ErrorCode::InvalidConfig, "rollout needs --script or --endpoint");
  }

  std::string prompt = o.prompt;
  if (!o.problem.empty()) {
    const std::string tmpl = o.prompt_template.empty() ? "{{problem}}" : read_file(o.prompt_template);
    prompt = fill_slot(tmpl, "problem", o.problem);
  }
  if (prompt.empty()) prompt = "<problem>";
  const std::vector<std::string> prompt_tokens{prompt};

  auto run_one = [&](std::uint64_t seed, std::size_t jobs) {
    auto rc = cfg.rollout_config(jobs);
    rc.seed = seed;
    const auto tree = run_rollout(*oracle, prompt_tokens, rc);
    std::vector<std::optional<RewardBreakdown>> rewards;
    json dump;
    if (!o.gold.empty()) rewards = score_tree(tree, o.gold, cfg.reward);
    dump = to_json(tree, rewards);
    dump["seed"] = seed;
    if (!o.gold.empty()) {
      try {
        const auto best = select_best(tree, o.gold, cfg.reward);
        dump["selected"] = {{"node_id", best.node_id}, {"reward", to_json(best.reward)}};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoCompleteNode) throw;
        dump["selected"] = nullptr;
      }
    }
    return dump;
  };

  Output out(o.out);
  if (o.runs == 1) {
    out.stream() << run_one(cfg.rollout.seed, g.jobs).dump(2) << '\n';
  } else {
    std::vector<json> dumps(o.runs);
    parallel_for(o.runs, g.jobs, [&](std::size_t i) { dumps[i] = run_one(cfg.rollout.seed + i, 1); });
    for (const auto& d : dumps) out.stream() << d.dump() << '\n';
  }
  write_effective_config(cfg, o.out);
  return kOk;
}

int cmd_curate(const GlobalOptions& g, const CurateOptions& o) {
  auto cfg = resolve_config(g);
  if (o.entropy_threshold) cfg.curator.entropy_threshold = o.entropy_threshold;
  if (!o.cache.empty()) cfg.curator.cache_path = o.cache;
  if (!o.prompt_template.empty()) cfg.curator.prompt_template = o.prompt_template;

  CuratorConfig cc;
  cc.lexicon = o.lexicon.empty() ? cfg.reward.lexicon : lexicon_from_option(o.lexicon, cfg.reward.lexicon);
  if (!o.lexicon.empty()) cfg.reward.lexicon = cc.lexicon;
  cc.entropy_threshold = cfg.curator.entropy_threshold;
  cc.threshold_quantile = cfg.curator.threshold_quantile;
  if (!cfg.curator.prompt_template.empty()) cc.prompt = PromptTemplate::load(cfg.curator.prompt_template);
  cc.gold_filter = cfg.curator.gold_filter;
  cc.matcher = cfg.reward.answer_matcher;
  cc.jobs = cfg.curator.mock ? g.jobs : std::min(g.jobs, cfg.curator.concurrency);

  std::shared_ptr<const RewriterClient> client;
  if (cfg.curator.mock) {
    client = std::make_shared<MockRewriter>();
  } else {
    HttpRewriterConfig hc;
    hc.endpoint = cfg.curator.endpoint;
    hc.auth_token = auth_token();
    hc.model = cfg.curator.model;
    hc.retries = cfg.curator.retries;
    client = std::make_shared<HttpRewriter>(hc);
  }
  if (!cfg.curator.cache_path.empty()) {
    client = std::make_shared<CachedRewriter>(client, std::make_shared<ResponseCache>(cfg.curator.cache_path));
  }

  const auto report = curate_corpus(o.in, o.out, cc, *client);
  {
    std::ofstream rep(o.out + ".report.json");
    if (!rep) throw Error(ErrorCode::Io, "cannot write report for " + o.out);
    rep << report.to_json().dump(2) << '\n';
  }
  write_effective_config(cfg, o.out);
  std::cerr << "processed " << report.processed << ", emitted " << report.emitted << ", skipped " << report.skipped
            << ", compression rejected " << report.compression_rejected << ", easy-token reduction "
            << format_fixed(100.0 * report.easy_token_reduction(), 1) << "%\n";
  const auto failures = report.skip_reasons.find("client_unavailable");
  if (failures != report.skip_reasons.end() && failures->second > 0) return kClientError;
  return kOk;
}

int cmd_entropy(const GlobalOptions& g, const EntropyOptions& o) {
  const auto cfg = resolve_config(g);
  const std::size_t k = o.k.value_or(cfg.branch.k);
  const auto lines = read_lines(o.in);

  std::vector<std::string> order;
  std::map<std::string, std::vector<TokenEvent>> traces;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const auto j = parse_json_line(lines[i], i + 1);
    const std::string id = j.contains("trace_id") ? group_key(j["trace_id"]) : "0";
    if (!traces.count(id)) order.push_back(id);
    traces[id].push_back(token_event_from_json(j));
  }

  Output out(o.out);
  std::size_t failed = 0;
  double easy_sum = 0.0, hard_sum = 0.0;
  std::size_t easy_n = 0, hard_n = 0;
  for (const auto& id : order) {
    const auto& tokens = traces[id];
    std::string text;
    for (const auto& t : tokens) text += t.token_text;
    const auto parse = parse_trace(text);
    if (!parse.ok) {
      ++failed;
      json err = {{"type", "error"}, {"trace_id", id}, {"error", "trace does not parse"}};
      err["parse"] = to_json(parse);
      out.stream() << err.dump() << '\n';
      continue;
    }
    TraceEntropyReport report;
    try {
      const auto aligned = align_tokens_to_units(text, parse, tokens);
      report = analyze_trace_entropy(*parse.trace, aligned, k);
    } catch (const Error& e) {
      ++failed;
      out.stream() << json{{"type", "error"}, {"trace_id", id}, {"error", e.what()}}.dump() << '\n';
      continue;
    }
    for (const auto& u : report.units) {
      json rec = {{"type", "unit"}, {"trace_id", id}};
      rec.update(to_json(u));
      out.stream() << rec.dump() << '\n';
      const double d = u.terminal_mean - u.initial_mean;
      if (u.mode == ReasoningMode::Easy) {
        easy_sum += d;
        ++easy_n;
      } else {
        hard_sum += d;
        ++hard_n;
      }
    }
    auto summary = to_json(report);
    summary.erase("units");
    summary["type"] = "trace_summary";
    summary["trace_id"] = id;
    out.stream() << summary.dump() << '\n';
  }
  auto mode = [](std::size_t n, double sum) {
    return json{{"units", n}, {"mean_terminal_minus_initial", n ? json(sum / static_cast<double>(n)) : json(nullptr)}};
  };
  out.stream() << json{{"type", "corpus_summary"},
                       {"traces", order.size()},
                       {"failed", failed},
                       {"k", k},
                       {"easy", mode(easy_n, easy_sum)},
                       {"hard", mode(hard_n, hard_sum)},
                       {"note", "entropies from renormalized top-k distributions are biased low"}}
                      .dump()
               << '\n';
  write_effective_config(cfg, o.out);
  return failed == 0 ? kOk : kValidationFailed;
}

int cmd_eval(const GlobalOptions& g, const EvalOptions& o) {
  resolve_config(g);
  std::ifstream in(o.in);
  if (!in) throw Error(ErrorCode::Io, "cannot open input " + o.in);
  const auto table = load_eval_jsonl(in, o.baseline, o.samples);
  auto report = build_report(table);
  report.token_convention = o.token_convention;
  std::cout << report.render_table();
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + o.out);
    out << report.to_json().dump(2) << '\n';
  }
  if (!o.plot_data.empty()) {
    std::ofstream out(o.plot_data);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + o.plot_data);
    out << report.plot_data().dump(2) << '\n';
  }
  return kOk;
}

}  // namespace adr::cli
