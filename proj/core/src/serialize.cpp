#include "adr/serialize.hpp"

#include "adr/error.hpp"

namespace adr {

using nlohmann::json;

json to_json(const ParseReport& report) {
  json j;
  j["ok"] = report.ok;
  auto& v = j["violations"] = json::array();
  for (const auto& x : report.violations) {
    v.push_back({{"code", to_string(x.code)}, {"offset", x.offset}, {"message", x.message}});
  }
  if (report.trace) {
    auto& units = j["units"] = json::array();
    for (const auto& u : report.trace->units) units.push_back({{"mode", to_string(u.mode)}, {"text", u.text}});
    j["answer"] = report.trace->answer;
  }
  return j;
}

json to_json(const RewardBreakdown& r) {
  return {{"r_format", r.r_format},
          {"r_accuracy", r.r_accuracy},
          {"r_unit", r.r_unit},
          {"r_mode", r.r_mode},
          {"total", r.total}};
}

json to_json(const UnitEntropyStats& s) {
  return {{"unit_index", s.unit_index},       {"mode", to_string(s.mode)}, {"initial_mean", s.initial_mean},
          {"terminal_mean", s.terminal_mean}, {"k", s.k},                  {"n_tokens", s.n_tokens}};
}

json to_json(const TraceEntropyReport& report) {
  auto mode_json = [](const ModeEntropySummary& m) {
    json j = {{"units", m.units}};
    j["mean_terminal_minus_initial"] =
        m.mean_terminal_minus_initial ? json(*m.mean_terminal_minus_initial) : json(nullptr);
    return j;
  };
  json units = json::array();
  for (const auto& u : report.units) units.push_back(to_json(u));
  return {{"units", units}, {"easy", mode_json(report.easy)}, {"hard", mode_json(report.hard)}};
}

json to_json(const RolloutTree& tree, const std::vector<std::optional<RewardBreakdown>>& rewards) {
  json j;
  j["h0"] = tree.h0 ? json(*tree.h0) : json(nullptr);
  auto& nodes = j["nodes"] = json::array();
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    json node = {
        {"node_id", n.node_id},
        {"parent_id", n.parent_id ? json(*n.parent_id) : json(nullptr)},
        {"fork_offset", n.fork_offset},
        {"n_tokens", n.tokens.size()},
        {"complete", n.complete},
        {"stop_reason", n.stop_reason},
        {"text", n.text()},
    };
    auto& toks = node["tokens"] = json::array();
    for (const auto& t : n.tokens) toks.push_back({{"token", t.token_text}, {"entropy", t.entropy_nats}});
    if (n.trace) node["parse"] = to_json(*n.trace);
    if (i < rewards.size() && rewards[i]) node["reward"] = to_json(*rewards[i]);
    nodes.push_back(std::move(node));
  }
  auto& events = j["branch_events"] = json::array();
  for (const auto& e : tree.branch_events) {
    events.push_back({{"node_id", e.node_id},
                      {"token_offset", e.token_offset},
                      {"h_current", e.h_current},
                      {"delta_h", e.delta_h},
                      {"probability", e.probability},
                      {"decision", e.decision},
                      {"child_id", e.child_id ? json(*e.child_id) : json(nullptr)}});
  }
  return j;
}

TokenEvent token_event_from_json(const json& j) {
  try {
    auto token = j.at("token").get<std::string>();
    if (j.contains("top_logprobs")) {
      std::vector<std::pair<std::string, double>> top;
      const auto& tl = j.at("top_logprobs");
      if (tl.is_object()) {
        for (const auto& [k, v] : tl.items()) top.emplace_back(k, v.get<double>());
      } else {
        for (const auto& e : tl) top.emplace_back(e.at(0).get<std::string>(), e.at(1).get<double>());
      }
      return token_event_from_logprobs(std::move(token), top);
    }
    if (j.contains("probs")) return make_token_event(std::move(token), j.at("probs").get<std::vector<double>>());
    TokenEvent ev;
    ev.token_text = std::move(token);
    ev.entropy_nats = j.at("entropy").get<double>();
    if (!(ev.entropy_nats >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative entropy");
    return ev;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad token event: ") + e.what());
  }
}

}  // namespace adr
