#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "support/tempdir.hpp"

#ifndef ADR_CLI
#error "ADR_CLI must name the adr executable"
#endif

namespace adr {
namespace {

using nlohmann::json;
using testing::read_text;
using testing::TempDir;
using testing::write_text;

const std::string kData = ADR_DATA_DIR;

class Cli : public ::testing::Test {
 protected:
  // Runs the tool with stdout and stderr captured into files under the temp dir.
  int run(const std::string& args) {
    const std::string cmd = std::string(ADR_CLI) + " " + args + " > " + dir.file("stdout").string() + " 2> " +
                            dir.file("stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return read_text(dir.file("stdout")); }
  std::string err() const { return read_text(dir.file("stderr")); }
  std::string path(const std::string& name) const { return dir.file(name).string(); }

  TempDir dir;
};

TEST_F(Cli, ValidateExitCodes) {
  write_text(dir.file("ok.txt"), "<think> <easy> a </easy> </think> 1\n<think> <hard> Wait </hard> </think> 2\n");
  EXPECT_EQ(run("validate --in " + path("ok.txt")), 0);

  write_text(dir.file("bad.jsonl"),
             "{\"trace_text\": \"<think> <easy> a </easy> </think> 1\"}\n"
             "{\"trace_text\": \"<think> <easy> a </think> 1\"}\n");
  EXPECT_EQ(run("validate --in " + path("bad.jsonl")), 1);
  std::istringstream lines(out());
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  const auto second = json::parse(line);
  EXPECT_EQ(second.at("line"), 2);
  EXPECT_EQ(second.at("ok"), false);

  write_text(dir.file("empty.txt"), "");
  EXPECT_EQ(run("validate --in " + path("empty.txt")), 0);
  EXPECT_NE(err().find("warning"), std::string::npos);

  EXPECT_EQ(run("validate --in " + path("missing.txt")), 3);
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

TEST_F(Cli, ScoreGroups) {
  write_text(dir.file("g.jsonl"),
             R"({"group_id": "u", "trace_text": "<think> <easy> a b </easy> </think> 3", "gold_answer": "3"})" "\n"
             R"({"group_id": 7, "trace_text": "<think> <easy> a b c d e f </easy> <hard> Wait x y z </hard> </think> 5", "gold_answer": "5"})" "\n"
             R"({"group_id": "u", "trace_text": "<think> <easy> c d </easy> </think> 3", "gold_answer": "3"})" "\n"
             R"({"group_id": 7, "trace_text": "<think> <easy> a </easy> </think> 6", "gold_answer": "5"})" "\n"
             R"({"group_id": 7, "trace_text": "<think> <easy> a </think> 5", "gold_answer": "5"})" "\n");
  ASSERT_EQ(run("--jobs 3 score --in " + path("g.jsonl") + " --out " + path("s.jsonl")), 0);
  const auto rows = json_lines(read_text(dir.file("s.jsonl")));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].at("advantage"), 0.0);
  EXPECT_EQ(rows[2].at("advantage"), 0.0);
  EXPECT_EQ(rows[2].at("index"), 1);
  EXPECT_EQ(rows[1].at("group_id"), 7);
  EXPECT_NEAR(rows[1].at("total").get<double>(), 0.7 + 0.3 * (1.0 / 3.0 * 0.6 + 2.0 / 3.0 * 0.4), 1e-12);
  EXPECT_EQ(rows[4].at("total"), 0.0);
  EXPECT_EQ(rows[4].at("r_format"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir.file("s.jsonl.config.json")));
}

TEST_F(Cli, RolloutDeterministicAcrossJobs) {
  const std::string script = kData + "/scripts/edr_demo.jsonl";
  ASSERT_EQ(run("--seed 5 rollout --script " + script + " --gold 42 --out " + path("a.json")), 0);
  ASSERT_EQ(run("--seed 5 --jobs 4 rollout --script " + script + " --gold 42 --out " + path("b.json")), 0);
  EXPECT_EQ(read_text(dir.file("a.json")), read_text(dir.file("b.json")));
  ASSERT_EQ(run("--seed 5 --jobs 3 rollout --script " + script + " --runs 20 --out " + path("r3.jsonl")), 0);
  ASSERT_EQ(run("--seed 5 rollout --script " + script + " --runs 20 --out " + path("r1.jsonl")), 0);
  EXPECT_EQ(read_text(dir.file("r1.jsonl")), read_text(dir.file("r3.jsonl")));
  EXPECT_EQ(json_lines(read_text(dir.file("r1.jsonl"))).size(), 20u);
}

TEST_F(Cli, RolloutCappedScriptForks) {
  ASSERT_EQ(run("rollout --script " + kData + "/scripts/sp_one.jsonl --gold 42"), 0);
  const auto tree = json::parse(out());
  EXPECT_EQ(tree.at("nodes").size(), 2u);
  EXPECT_EQ(tree.at("branch_events").size(), 1u);
  EXPECT_EQ(tree.at("branch_events").at(0).at("decision"), true);
}

TEST_F(Cli, ConfigErrors) {
  const std::string script = kData + "/scripts/sp_one.jsonl";
  EXPECT_EQ(run("--stage 8k --edr rollout --script " + script), 2);
  EXPECT_EQ(run("--stage 8k rollout --script " + script), 0);
  EXPECT_EQ(json::parse(out()).at("nodes").size(), 1u);
  write_text(dir.file("bad.json"), R"({"rollout": {"stage": "8k", "edr_enabled": true}})");
  EXPECT_EQ(run("--config " + path("bad.json") + " rollout --script " + script), 2);
  write_text(dir.file("typo.json"), R"({"rollot": {}})");
  EXPECT_EQ(run("--config " + path("typo.json") + " eval --in " + kData + "/results_table.jsonl"), 2);
  EXPECT_EQ(run("--no-such-flag validate --in x"), 2);
  EXPECT_EQ(run("rollout"), 2);
  EXPECT_EQ(run("rollout --script " + path("missing.jsonl")), 3);
}

TEST_F(Cli, EffectiveConfigRoundTrip) {
  const std::string script = kData + "/scripts/sp_one.jsonl";
  ASSERT_EQ(run("--seed 17 --stage 16k rollout --script " + script + " --out " + path("t1.json")), 0);
  ASSERT_EQ(run("--config " + path("t1.json.config.json") + " rollout --script " + script + " --out " + path("t2.json")), 0);
  EXPECT_EQ(read_text(dir.file("t1.json.config.json")), read_text(dir.file("t2.json.config.json")));
  EXPECT_EQ(read_text(dir.file("t1.json")), read_text(dir.file("t2.json")));
  EXPECT_EQ(json::parse(read_text(dir.file("t2.json.config.json"))).at("rollout").at("seed"), 17);
}

TEST_F(Cli, CurateMockIsReproducible) {
  const std::string in = kData + "/synthetic_cot_200.jsonl";
  ASSERT_EQ(run("--mock curate --in " + in + " --out " + path("c1.jsonl")), 0);
  ASSERT_EQ(run("--mock --jobs 4 curate --in " + in + " --out " + path("c2.jsonl")), 0);
  EXPECT_EQ(read_text(dir.file("c1.jsonl")), read_text(dir.file("c2.jsonl")));
  const auto report = json::parse(read_text(dir.file("c1.jsonl.report.json")));
  EXPECT_EQ(report.at("emitted"), 200);
  EXPECT_GT(report.at("easy_token_reduction").get<double>(), 0.0);
  EXPECT_TRUE(std::filesystem::exists(dir.file("c1.jsonl.config.json")));

  ASSERT_EQ(run("validate --in " + path("c1.jsonl")), 0);
  ASSERT_EQ(run("curate --lexicon Wait,However --entropy-threshold 99 --in " + in + " --out " + path("c3.jsonl")), 0);
}

TEST_F(Cli, CurateEndpointDownIsClientError) {
  write_text(dir.file("one.jsonl"), R"({"id": "a", "problem": "p", "cot": "x = 1.", "answer": "1"})" "\n");
  EXPECT_EQ(run("--endpoint http://127.0.0.1:1/v1/chat/completions curate --in " + path("one.jsonl") + " --out " +
                path("o.jsonl")),
            4);
}

TEST_F(Cli, EntropyReport) {
  std::string tokens;
  std::istringstream script(read_text(kData + "/scripts/edr_demo.jsonl"));
  std::string line;
  while (std::getline(script, line)) {
    auto j = json::parse(line);
    j["trace_id"] = "t1";
    tokens += j.dump() + "\n";
  }
  write_text(dir.file("tok.jsonl"), tokens);
  ASSERT_EQ(run("entropy --k 2 --in " + path("tok.jsonl")), 0);
  const auto rows = json_lines(out());
  ASSERT_EQ(rows.size(), 6u + 2u);
  EXPECT_EQ(rows[0].at("type"), "unit");
  EXPECT_EQ(rows[6].at("type"), "trace_summary");
  EXPECT_EQ(rows[7].at("type"), "corpus_summary");
  EXPECT_EQ(rows[7].at("hard").at("units"), 3);
  EXPECT_NEAR(rows[1].at("initial_mean").get<double>(), std::log(3.0), 1e-9);

  write_text(dir.file("broken.jsonl"), R"({"trace_id": "x", "token": "<think> <easy> a", "entropy": 1.0})" "\n");
  EXPECT_EQ(run("entropy --in " + path("broken.jsonl")), 1);
}

TEST_F(Cli, EvalTable) {
  ASSERT_EQ(run("eval --in " + kData + "/results_table.jsonl --out " + path("e.json") + " --emit-plot-data " + path("p.json")), 0);
  EXPECT_NE(out().find("0.70"), std::string::npos);
  const auto report = json::parse(read_text(dir.file("e.json")));
  EXPECT_EQ(report.at("methods").size(), 6u);
  EXPECT_EQ(json::parse(read_text(dir.file("p.json"))).size(), 15u);
  EXPECT_EQ(run("eval --baseline Nope --in " + kData + "/results_table.jsonl"), 1);
}

}  // namespace
}  // namespace adr
