#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "testing.hpp"

using namespace bdead;
namespace fixture = bdead::fixture;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string path(const std::string& name) { return fixture::model_path(name).string(); }

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bdead_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(ExitCodes, DeadlockFound) {
  EXPECT_EQ(run({"cbc", path("minset_v1")}).code, 1);
  EXPECT_EQ(run({"mc", path("minset_v1")}).code, 1);
}

TEST(ExitCodes, NoDeadlock) {
  EXPECT_EQ(run({"cbc", path("minset_v3")}).code, 0);
  EXPECT_EQ(run({"mc", path("minset_v2")}).code, 0);
}

TEST(ExitCodes, StateLimitIsNoDeadlockWithin) {
  const auto r = run({"mc", path("minset_v2"), "--max-states", "5", "--json"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["result"]["kind"], "noDeadlockWithin");
}

TEST(ExitCodes, Unknown) {
  const auto r = run({"cbc", path("pigeons"), "--timeout", "50", "--json"});
  EXPECT_EQ(r.code, 2);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["result"]["kind"], "unknown");
  EXPECT_FALSE(j["result"]["reason"].get<std::string>().empty());
}

TEST(ExitCodes, InputErrors) {
  EXPECT_EQ(run({"cbc", "/nonexistent/file.mch"}).code, 3);
  EXPECT_EQ(run({"cbc", path("minset_v1"), "--bogus"}).code, 3);
  EXPECT_EQ(run({"frobnicate", path("minset_v1")}).code, 3);
  EXPECT_EQ(run({}).code, 3);
  EXPECT_EQ(run({"cbc", path("minset_v1"), "--goal", "min :"}).code, 3);
  EXPECT_EQ(run({"cbc", path("minset_v1"), "--goal", "nope = 1"}).code, 3);
  EXPECT_EQ(run({"cbc", path("minset_v1"), "--events", "acc,nope"}).code, 3);
}

TEST(ExitCodes, ParseErrorNamesPosition) {
  const auto dir = temp_dir("parse");
  std::ofstream(dir / "bad.mch") << "MACHINE X VARIABLES\nEND\n";
  const auto r = run({"cbc", (dir / "bad.mch").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("bad.mch:2:1:"), std::string::npos) << r.err;
}

TEST(ExitCodes, WdError) {
  const auto r = run({"cbc", path("wd")});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("x div y >= 0"), std::string::npos);
}

TEST(Json, SchemaKeys) {
  const auto j = json::parse(run({"cbc", path("minset_v2"), "--json"}).out);
  for (const char* key : {"version", "machine", "mode", "options", "result", "guards", "droppedEvents", "warnings", "timings"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["version"], cli::kVersion);
  EXPECT_EQ(j["machine"], "MinSet");
  EXPECT_EQ(j["mode"], "cbc");
  const auto& result = j["result"];
  EXPECT_EQ(result["kind"], "deadlock");
  EXPECT_EQ(result["state"]["s"], json::array());
  EXPECT_TRUE(result["state"]["min"].is_number_integer());
  EXPECT_FALSE(result["boundsQualified"].get<bool>());
  for (const char* key : {"parseMs", "buildMs", "solveMs", "totalMs"}) EXPECT_TRUE(j["timings"][key].is_number()) << key;
  ASSERT_EQ(j["guards"].size(), 3u);
  for (const auto& g : j["guards"]) {
    EXPECT_FALSE(g["enabled"].get<bool>());
    EXPECT_TRUE(g["falsifiedConjunct"].is_string());
  }
}

TEST(Json, McTrace) {
  const auto j = json::parse(run({"mc", path("counter"), "--json"}).out);
  EXPECT_EQ(j["mode"], "mc");
  const auto& trace = j["result"]["trace"];
  ASSERT_FALSE(trace.empty());
  EXPECT_EQ(trace[0]["event"], "INITIALISATION");
  EXPECT_EQ(trace.back()["state"], j["result"]["state"]);
  EXPECT_TRUE(j["result"]["statesVisited"].is_number_integer());
}

TEST(Json, WdReport) {
  const auto j = json::parse(run({"cbc", path("wd"), "--json"}).out);
  EXPECT_EQ(j["result"]["kind"], "wdError");
  EXPECT_EQ(j["result"]["wd"]["atom"], "x div y >= 0");
  EXPECT_FALSE(j["result"]["wd"]["what"].get<std::string>().empty());
}

TEST(Json, DroppedEvents) {
  const auto j = json::parse(run({"cbc", path("counter"), "--goal", "Counter = 10", "--json"}).out);
  EXPECT_EQ(j["droppedEvents"], json::array({"inc", "mark"}));
  EXPECT_EQ(j["result"]["state"]["Counter"], 10);
  EXPECT_EQ(j["result"]["state"]["flag"], true);
}

TEST(Text, AgreesWithJson) {
  for (const char* name : {"minset_v1", "minset_v2", "minset_v3", "counter"}) {
    for (const char* mode : {"cbc", "mc"}) {
      const auto text = run({mode, path(name)});
      const auto js = run({mode, path(name), "--json"});
      EXPECT_EQ(text.code, js.code) << name << " " << mode;
      const auto j = json::parse(js.out);
      const std::string kind = j["result"]["kind"];
      const std::string label = kind == "deadlock" ? "result: deadlock found" : "result: no deadlock";
      EXPECT_NE(text.out.find(label), std::string::npos) << text.out;
      if (kind == "deadlock")
        for (const auto& [var, value] : j["result"]["state"].items())
          EXPECT_NE(text.out.find("  " + var + " = "), std::string::npos) << var;
    }
  }
}

TEST(Text, GuardLines) {
  const auto r = run({"cbc", path("minset_v2")});
  EXPECT_NE(r.out.find("get: disabled, s = {min} is FALSE"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("state:\n  N = {3}"), std::string::npos) << r.out;
}

TEST(Flags, LastValueWins) {
  const auto j = json::parse(run({"mc", path("minset_v2"), "--max-states", "5", "--max-states", "7", "--json"}).out);
  EXPECT_EQ(j["result"]["statesVisited"], 7);
}

TEST(Flags, ToggleOptionsRecorded) {
  const auto j = json::parse(
      run({"cbc", path("minset_v1"), "--no-simplify", "--no-sort", "--no-partition", "--keep-irrelevant", "--json"}).out);
  EXPECT_EQ(j["result"]["kind"], "deadlock");
  EXPECT_EQ(j["options"]["simplify"], "false");
  EXPECT_EQ(j["options"]["partition"], "false");
}

TEST(Flags, TraceLogGoesToStderr) {
  const auto r = run({"cbc", path("minset_v3"), "--trace-log"});
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST(Sidecar, OptionsFileApplied) {
  const auto dir = temp_dir("sidecar");
  std::filesystem::copy_file(path("minset_v2"), dir / "m.mch");
  std::ofstream(dir / "m.mch.opts") << "# keep the search short\n--max-states 4\n";
  EXPECT_EQ(cli::sidecar_args(dir / "m.mch"), (std::vector<std::string>{"--max-states", "4"}));
  const auto j = json::parse(run({"mc", (dir / "m.mch").string(), "--json"}).out);
  EXPECT_EQ(j["result"]["statesVisited"], 4);
  const auto k = json::parse(run({"mc", (dir / "m.mch").string(), "--max-states", "6", "--json"}).out);
  EXPECT_EQ(k["result"]["statesVisited"], 6);
}

TEST(Sidecar, AbsentFile) { EXPECT_TRUE(cli::sidecar_args(path("minset_v1")).empty()); }

TEST(Bench, CorpusTable) {
  const auto r = run({"bench", (fixture::data_dir() / "corpus").string()});
  EXPECT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string header, line;
  std::getline(lines, header);
  EXPECT_EQ(header.rfind("model", 0), 0u);
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '*') ++rows;
  EXPECT_EQ(rows, 7);
  EXPECT_NE(r.out.find("minset_v3    "), std::string::npos);
}

TEST(Bench, RowsMatchSingleRuns) {
  const auto rows = cli::bench(fixture::data_dir() / "corpus", {});
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].model, "minset_v1");
  EXPECT_EQ(rows[0].cbc_result, "deadlock");
  EXPECT_EQ(rows[1].mc_result, "no deadlock");
  EXPECT_EQ(rows[2].cbc_result, "no deadlock");
  const auto j = cli::bench_json(rows);
  EXPECT_EQ(j["version"], cli::kVersion);
  ASSERT_EQ(j["rows"].size(), 7u);
  EXPECT_EQ(j["rows"][0]["cbc"]["result"], "deadlock");
}

TEST(Bench, StateLimitFootnote) {
  const auto dir = temp_dir("bench");
  std::filesystem::copy_file(path("minset_v2"), dir / "m.mch");
  std::ofstream(dir / "m.mch.opts") << "--max-states 3\n";
  const auto r = run({"bench", dir.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("* no deadlock found after visiting 3 states"), std::string::npos) << r.out;
}

TEST(Bench, EmptyDirectory) {
  const auto r = run({"bench", temp_dir("empty").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
}
