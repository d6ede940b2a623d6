#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

using nlohmann::json;

struct Result {
  int code = 0;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "fundim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = fundim::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "fundim_cli_test";
    std::filesystem::create_directories(dir_);
    write("s0.json",
          R"({"widths":[1,2,1],"scalar_mode":"rational","layers":[["2","-5","-1","4"],["1","1","1"]]})");
    write("f.json", R"({"widths":[1,1],"scalar_mode":"float","layers":[[1.0,0.0]]})");
    write("dead.json", R"({"widths":[1,1],"scalar_mode":"rational","layers":[["0","0"]]})");
    write("broken.json", "{\"widths\": [1,1],\n \"layers\": ]");
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  std::filesystem::path dir_;
};

TEST_F(Cli, EvalWorkedExample) {
  const auto r = run({"eval", "--net", path("s0.json"), "--x", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["output"], json::array({"3"}));
  EXPECT_EQ(r.doc()["config"]["x"], "3");
}

TEST_F(Cli, DecisiveDimension) {
  const auto r = run({"dim", "--net", path("s0.json"), "--strategy", "decisive"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d = r.doc();
  EXPECT_EQ(d["value"], 5);
  EXPECT_EQ(d["backend"], "exact");
  EXPECT_EQ(d["config"]["seed"], "0");
  EXPECT_TRUE(d.contains("tol"));
}

TEST_F(Cli, OnesChainExperiment) {
  const auto r = run({"experiment", "ones-chain", "--len", "6", "--seed", "0", "--trials", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["summary"]["max"], 4);
}

TEST_F(Cli, GlobalOptionsAfterSubcommand) {
  const auto r = run({"eval", "--net", path("s0.json"), "--x", "0", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "output,value\n0,\"5\"\n");
}

TEST_F(Cli, JacobianCsv) {
  const auto r = run({"--format", "csv", "jacobian", "--net", path("s0.json"), "--points", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "point,output,layer,row,col,value");
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"eval", "--net", path("s0.json")}).code, 1);
  EXPECT_EQ(run({"eval", "--net", path("f.json"), "--mode", "rational", "--x", "1"}).code, 1);
  EXPECT_EQ(run({"--tol", "-1", "demo"}).code, 1);
}

TEST_F(Cli, MalformedJsonReportsPosition) {
  const auto r = run({"eval", "--net", path("broken.json"), "--x", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(Cli, AnalysisErrorsExitTwo) {
  EXPECT_EQ(run({"dim", "--net", path("dead.json")}).code, 2);
  EXPECT_EQ(run({"jacobian", "--net", path("s0.json"), "--points", "5/2"}).code, 2);
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST_F(Cli, OutputFile) {
  const auto r = run({"-o", path("out.json"), "label", "--net", path("s0.json"), "--x", "5/2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("out.json"));
  const auto d = json::parse(in);
  EXPECT_EQ(d["label_string"], "((0,1),(1))");
}

TEST_F(Cli, SymmetrySaveRoundTrip) {
  const auto r = run({"symmetry", "--net", path("s0.json"), "--step", "rescale:0,0,2", "--save",
                      path("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.doc()["invariant_on_grid"].get<bool>());
  const auto e = run({"eval", "--net", path("t.json"), "--x", "3"});
  EXPECT_EQ(e.doc()["output"], json::array({"3"}));
}

TEST_F(Cli, DemoPasses) {
  const auto r = run({"demo"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
}

TEST_F(Cli, ReportsAreReproducible) {
  const std::vector<std::string> args{"experiment", "upper-bound", "--widths", "2,2,1",
                                      "--trials", "30", "--seed", "5"};
  EXPECT_EQ(run(args).out, run(args).out);
}

}  // namespace
