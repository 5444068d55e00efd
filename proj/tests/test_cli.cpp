#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "qrm/bench.hpp"

namespace fs = std::filesystem;

namespace {

const char* kCli = QRM_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + kCli + "\" " + args;
  const int status = std::system(cmd.c_str());
  if (status == -1) {
    return -1;
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qrm_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, GenerateScheduleVerifyPipeline) {
  for (const int seed : {1, 2, 3, 4, 5}) {
    const std::string s = std::to_string(seed);
    ASSERT_EQ(run("generate -w 8 -t 4 -p 0.5 -s " + s + " -o " + p("grid" + s + ".qpk")), 0);
    ASSERT_EQ(run("schedule -i " + p("grid" + s + ".qpk") + " -o " + p("sched" + s + ".qsc")), 0);
    EXPECT_EQ(run("verify -g " + p("grid" + s + ".qpk") + " -s " + p("sched" + s + ".qsc")), 0)
        << "seed " << seed;
  }
}

TEST_F(CliTest, FullGridScheduleIsEmptyAndSuccessful) {
  ASSERT_EQ(run("generate -w 8 -t 4 -p 1.0 -s 0 -o " + p("full.qpk")), 0);
  ASSERT_EQ(run("schedule -i " + p("full.qpk") + " -o " + p("full.qsc") + " > " + p("out.txt")),
            0);
  const std::string summary = slurp(p("out.txt"));
  EXPECT_NE(summary.find("merged_moves=0"), std::string::npos);
  EXPECT_NE(summary.find("success=1"), std::string::npos);
  EXPECT_EQ(run("verify -g " + p("full.qpk") + " -s " + p("full.qsc")), 0);
}

TEST_F(CliTest, BaselineScheduleAlsoVerifies) {
  ASSERT_EQ(run("generate -w 10 -t 4 -p 0.6 -s 7 -o " + p("grid.qpk")), 0);
  ASSERT_EQ(run("schedule -i " + p("grid.qpk") + " -a baseline -o " + p("sched.qsc")), 0);
  EXPECT_EQ(run("verify -g " + p("grid.qpk") + " -s " + p("sched.qsc")), 0);
}

TEST_F(CliTest, VerifyCatchesTamperedSteps) {
  ASSERT_EQ(run("generate -w 8 -t 4 -p 0.5 -s 1 -o " + p("grid.qpk")), 0);
  ASSERT_EQ(run("schedule -i " + p("grid.qpk") + " -o " + p("sched.qsc")), 0);
  std::string text = slurp(p("sched.qsc"));
  const auto pos = text.find("steps=1");
  ASSERT_NE(pos, std::string::npos) << "expected at least one move";
  text.replace(pos, 7, "steps=2");
  spit(p("sched.qsc"), text);
  EXPECT_EQ(run("verify -g " + p("grid.qpk") + " -s " + p("sched.qsc")), 1);
}

TEST_F(CliTest, VerifyCatchesFlippedSuccessFlag) {
  ASSERT_EQ(run("generate -w 8 -t 4 -p 0.5 -s 1 -o " + p("grid.qpk")), 0);
  ASSERT_EQ(run("schedule -i " + p("grid.qpk") + " -o " + p("sched.qsc")), 0);
  std::string text = slurp(p("sched.qsc"));
  const auto yes = text.find("success=1");
  const auto no = text.find("success=0");
  if (yes != std::string::npos) {
    text.replace(yes, 9, "success=0");
  } else {
    ASSERT_NE(no, std::string::npos);
    text.replace(no, 9, "success=1");
  }
  spit(p("sched.qsc"), text);
  EXPECT_EQ(run("verify -g " + p("grid.qpk") + " -s " + p("sched.qsc")), 1);
}

TEST_F(CliTest, VerifyCatchesMismatchedGrid) {
  ASSERT_EQ(run("generate -w 8 -t 4 -p 0.5 -s 1 -o " + p("grid.qpk")), 0);
  ASSERT_EQ(run("schedule -i " + p("grid.qpk") + " -o " + p("sched.qsc")), 0);
  ASSERT_EQ(run("generate -w 10 -t 4 -p 0.5 -s 1 -o " + p("other.qpk")), 0);
  EXPECT_EQ(run("verify -g " + p("other.qpk") + " -s " + p("sched.qsc")), 1);
}

TEST_F(CliTest, BadInputsExitWithTwo) {
  EXPECT_EQ(run("generate -w 7 -t 4 -o " + p("grid.qpk")), 2);
  EXPECT_EQ(run("schedule -i " + p("missing.qpk") + " -o " + p("sched.qsc")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("schedule -i " + p("grid.qpk") + " -o " + p("s.qsc") + " --algo wat"), 2);
  spit(p("junk.qsc"), "qrmsched 1\ngrid W=8 T=4 atoms=0\n");
  ASSERT_EQ(run("generate -w 8 -t 4 -o " + p("grid.qpk")), 0);
  EXPECT_EQ(run("verify -g " + p("grid.qpk") + " -s " + p("junk.qsc")), 2);
}

TEST_F(CliTest, ShowRendersGridsAndSchedules) {
  ASSERT_EQ(run("generate -w 8 -t 4 -p 0.5 -s 3 -o " + p("grid.qpk")), 0);
  ASSERT_EQ(run("show " + p("grid.qpk") + " > " + p("grid.txt")), 0);
  const std::string grid_out = slurp(p("grid.txt"));
  EXPECT_NE(grid_out.find("W=8"), std::string::npos);
  EXPECT_NE(grid_out.find("●"), std::string::npos);

  ASSERT_EQ(run("schedule -i " + p("grid.qpk") + " -o " + p("sched.qsc")), 0);
  ASSERT_EQ(run("show " + p("sched.qsc") + " > " + p("sched.txt")), 0);
  const std::string sched_out = slurp(p("sched.txt"));
  EXPECT_NE(sched_out.find("initial"), std::string::npos);
  EXPECT_NE(sched_out.find("iteration 1:"), std::string::npos);
  EXPECT_NE(sched_out.find("final"), std::string::npos);
}

TEST_F(CliTest, BenchIsDeterministicExceptWallTime) {
  const auto a = qrm::run_bench(8, qrm::TargetRegion{4}, 0.5, 0, 10, false);
  const auto b = qrm::run_bench(8, qrm::TargetRegion{4}, 0.5, 0, 10, false);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].seed, b.rows[i].seed);
    EXPECT_EQ(a.rows[i].popcount, b.rows[i].popcount);
    EXPECT_EQ(a.rows[i].success, b.rows[i].success);
    EXPECT_EQ(a.rows[i].iterations, b.rows[i].iterations);
    EXPECT_EQ(a.rows[i].merged_moves, b.rows[i].merged_moves);
    EXPECT_EQ(a.rows[i].lowered_moves, b.rows[i].lowered_moves);
  }
  EXPECT_EQ(a.success_rate, b.success_rate);
  EXPECT_EQ(a.iteration_histogram, b.iteration_histogram);
}

TEST_F(CliTest, BenchWritesTableAndSummary) {
  ASSERT_EQ(run("bench -w 8 -t 4 -p 0.5 --seed0 0 -n 5 -o " + p("report.tsv")), 0);
  const std::string report = slurp(p("report.tsv"));
  EXPECT_NE(report.find("seed\tpopcount\tsuccess"), std::string::npos);
  EXPECT_NE(report.find("success_rate="), std::string::npos);
  EXPECT_NE(report.find("iterations_histogram:"), std::string::npos);
  // five data rows
  int rows = 0;
  for (const char c : report) {
    rows += c == '\n' ? 1 : 0;
  }
  EXPECT_GE(rows, 6);
}

} // namespace
