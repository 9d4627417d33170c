#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

// One scratch directory per test, so tests can run in parallel.
fs::path workdir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path d = fs::temp_directory_path() / "sublin_cli_test" / info->name();
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = "cd '" + workdir().string() + "' && '" SUBLIN_CLI "' " + args +
                          " >stdout.txt 2>stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name) {
  std::ifstream in(workdir() / name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Cli, Version) {
  EXPECT_EQ(run("--version"), 0);
  EXPECT_NE(slurp("stdout.txt").find("schema"), std::string::npos);
}

TEST(Cli, BadFlagsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("generate --n 64 --delta 0.5"), 2);  // no seed
  EXPECT_EQ(run("generate --n 64 --delta 0.5 --seed 1 --world maybe"), 2);
  EXPECT_EQ(run("estimate --n 64 --delta 1.5 --seed 1"), 2);
  EXPECT_EQ(run("experiment --n 64 --delta 0.5 --seed 1 --model tree"), 2);
  EXPECT_NE(slurp("stderr.txt").find("Usage"), std::string::npos);
}

TEST(Cli, InvariantViolationExitsOne) {
  EXPECT_EQ(run("generate --n 63 --delta 0.5 --seed 1"), 1);
  EXPECT_NE(slurp("stderr.txt").find("nearest valid n is 64"), std::string::npos);
}

TEST(Cli, GenerateWritesInstanceAndSidecar) {
  ASSERT_EQ(run("generate --n 64 --delta 0.5 --world yes --seed 7 --out g.txt"), 0);
  EXPECT_TRUE(fs::exists(workdir() / "g.txt"));
  EXPECT_NE(slurp("g.txt.truth.json").find("\"world\":\"yes\""), std::string::npos);
  EXPECT_EQ(slurp("g.txt").substr(0, 6), "80 80\n");
}

TEST(Cli, EstimateRowsAndDeterminism) {
  ASSERT_EQ(run("estimate --n 64 --delta 0.5 --trials 5 --seed 7 --csv a.csv"), 0);
  ASSERT_EQ(run("estimate --n 64 --delta 0.5 --trials 5 --seed 7 --csv b.csv"), 0);
  const auto a = slurp("a.csv");
  EXPECT_EQ(a, slurp("b.csv"));
  EXPECT_EQ(lines(a), 6u);
  EXPECT_EQ(a.substr(0, a.find('\n')), "seed,estimate,exact_mu,charged_queries");
}

TEST(Cli, EstimateOnGraphFile) {
  ASSERT_EQ(run("generate --n 64 --delta 0.5 --world no --seed 3 --out h.txt"), 0);
  ASSERT_EQ(run("estimate --graph h.txt --n 64 --delta 0.5 --seed 1 --trials 2"), 0);
  EXPECT_EQ(lines(slurp("stdout.txt")), 3u);
  EXPECT_EQ(run("estimate --graph missing.txt --n 64 --delta 0.5 --seed 1"), 1);
}

TEST(Cli, Distinguish) {
  ASSERT_EQ(run("distinguish --method two-round --n 256 --delta 0.5 --trials 4 --seed 2 --csv d.csv"), 0);
  EXPECT_EQ(lines(slurp("d.csv")), 5u);
  EXPECT_EQ(run("distinguish --method third-root --n 64 --delta 0.5 --seed 2"), 1);
}

TEST(Cli, Probe) {
  {
    std::ofstream plan(workdir() / "plan.txt");
    plan << "root 0 delta_bound 500\n1 1\n2 1\n1 200\nroot random delta_bound 80\n1 1\n";
  }
  ASSERT_EQ(run("probe --n 64 --delta 0.5 --seed 5 --plan plan.txt --csv t.csv"), 0);
  const auto t = slurp("t.csv");
  EXPECT_EQ(lines(t), 1u + 4u + 2u);
  EXPECT_NE(t.find("3,1,200,NULL"), std::string::npos);
}

TEST(Cli, ExperimentIsDeterministic) {
  const std::string args = "experiment --n 256 --delta 0.5 --epsilon 0.1 --trials 3 --seed 1 "
                           "--distinguisher birthday --csv ";
  ASSERT_EQ(run(args + "e1.csv"), 0);
  ASSERT_EQ(run(args + "e2.csv --jobs 2"), 0);
  EXPECT_EQ(slurp("e1.csv"), slurp("e2.csv"));
  EXPECT_EQ(lines(slurp("e1.csv")), 4u);
}
