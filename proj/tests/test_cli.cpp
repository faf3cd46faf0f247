#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sepdistill/cli.hpp"

using sepdistill::cli::execute_command;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = execute_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sepdistill::json parse(const Run& r) { return sepdistill::json::parse(r.out); }

}  // namespace

TEST(Golden, OutputsAreByteIdentical) {
  std::size_t cases = 0;
  for (const auto& entry : fs::directory_iterator(SEPDISTILL_GOLDEN_DIR)) {
    if (entry.path().extension() != ".args") continue;
    ++cases;
    auto expected_path = entry.path();
    expected_path.replace_extension(".out");
    ASSERT_TRUE(fs::exists(expected_path)) << expected_path;
    std::string line = slurp(entry.path());
    const auto r = run(split(line));
    EXPECT_EQ(r.out, slurp(expected_path)) << entry.path().filename();
  }
  EXPECT_GE(cases, 8u);
}

TEST(Schema, TopLevelKeysInOrder) {
  const auto j = parse(run({"verify", "--family", "ex-2x4", "--w", "0.5"}));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"command", "scenario", "report", "numeric_policy", "seed"}));
}

TEST(Verify, SepPairIsConditional) {
  const auto r = run({"verify", "--family", "thm1-sep", "--d", "2", "--k1", "1", "--w", "0.3"});
  EXPECT_EQ(r.code, 0);
  const auto rep = parse(r)["report"]["distillation"];
  EXPECT_EQ(rep["verdict"], "CONDITIONAL");
  EXPECT_NEAR(rep["transferred_probability"].get<double>(), 0.5, 1e-12);
}

TEST(Verify, TwoByFourIsDeterministic) {
  const auto r = run({"verify", "--family", "ex-2x4", "--w", "0.5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(parse(r)["report"]["distillation"]["verdict"], "DETERMINISTIC");
}

TEST(Verify, WrongTargetExitsOne) {
  const auto r = run({"verify", "--family", "ex-2x4", "--w", "0.5", "--target", "psi2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(parse(r)["report"]["distillation"]["verdict"], "FAILED");
}

TEST(Bounds, TwoByThreeIsUnsatisfied) {
  const auto r = run({"bounds", "--kind", "bipartite-sep", "--dims", "2,3", "--d", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(parse(r)["report"], sepdistill::json({{"satisfied", false}}));
}

TEST(Errors, BadArgumentsExitTwoWithUsage) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"verify", "--family", "thm1-sep"},
           {"verify", "--family", "nope"},
           {"verify", "--family", "bell-mix"},
           {"verify", "--family", "ex-2x4", "--w", "1"},
           {"verify", "--family", "thm1-sep", "--d", "2", "--k1", "0"},
           {"verify", "--fam", "ex-2x4"},
           {"bounds", "--kind", "bipartite-sep", "--dims", "2,3,4", "--d", "2"},
           {"search", "--family", "bell-mix", "--warm", "lifted"},
       }) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "<none>" : args[0]);
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(r.err.empty());
  }
}

TEST(Config, FillsOnlyUnsetFlags) {
  const auto path = fs::temp_directory_path() / "sepdistill_cli_config.json";
  std::ofstream(path) << R"({"family": "thm1-sep", "d": 2, "k1": 1, "w": 0.9})";
  const auto j = parse(run({"verify", "--config", path.string(), "--w", "0.3"}));
  EXPECT_EQ(j["scenario"]["family"], "thm1-sep");
  EXPECT_EQ(j["scenario"]["w"], 0.3);
  fs::remove(path);
}

TEST(Determinism, RepeatedSearchIsByteIdentical) {
  const std::vector<std::string> args{"search", "--family", "bell-mix", "--T", "2", "--restarts", "3",
                                      "--max-iter", "400", "--seed", "11"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Executable, ExitCodeAndStreams) {
  const auto out = fs::temp_directory_path() / "sepdistill_cli_out.txt";
  const std::string cmd = std::string(SEPDISTILL_CLI_PATH) + " verify --family bell-mix > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_NE(status, -1);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(slurp(out).find("error"), std::string::npos);
  fs::remove(out);
}
