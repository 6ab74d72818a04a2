#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "asymhash/report.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "asymhash_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run cli(const std::string& args) {
  const auto out = scratch("stdout.txt");
  const std::string cmd = std::string(ASYMHASH_CLI) + " " + args + " > " + out.string() + " 2> " +
                          scratch("stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::string data(const std::string& name) { return std::string(ASYMHASH_DATA) + "/" + name; }

TEST(Cli, SweepIsByteIdenticalAcrossRuns) {
  const auto corpus = scratch("zipf.es").string();
  ASSERT_EQ(cli("gen-synthetic --n-p 500 --s 1 --n-a 20000 --seed 3 --out " + corpus).code, 0);
  const std::string args = "sweep --corpus " + corpus + " --m 2,3,7 --v-grid 1:100000:12 --seed 3";
  const auto a = cli(args);
  const auto b = cli(args + " --workers 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(cli(args + " --emit json").out, cli(args + " --emit json").out);
}

TEST(Cli, CsvAndJsonCarrySameRows) {
  const std::string args = "sweep --corpus " + data("contrived.es") +
                           " --schedule time-even --m 2 --v-grid 0.5:5:7";
  std::istringstream csv(cli(args + " --emit csv").out);
  std::istringstream json(cli(args + " --emit json").out);
  const auto from_csv = asymhash::read_csv(csv);
  EXPECT_EQ(from_csv.size(), 14u);
  EXPECT_EQ(from_csv, asymhash::read_json(json));
}

TEST(Cli, GenSyntheticIsDeterministic) {
  const auto a = cli("gen-synthetic --n-p 100 --n-a 1000 --seed 9");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, cli("gen-synthetic --n-p 100 --n-a 1000 --seed 9").out);
  EXPECT_NE(a.out, cli("gen-synthetic --n-p 100 --n-a 1000 --seed 10").out);
}

TEST(Cli, SolveReadsStdinAndPlaintext) {
  const auto r = cli("solve --corpus - --schedule time-even --m 2 --v 1.45 --emit json < " +
                     data("contrived.es"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"taus\""), std::string::npos);
  EXPECT_NE(r.out.find("global_exact"), std::string::npos);

  const auto p = cli("solve --corpus " + data("tiny.txt") + " --format plaintext --v 10");
  EXPECT_EQ(p.code, 0);
}

TEST(Cli, OptimizeAndAuthsimRun) {
  const auto o = cli("optimize --corpus " + data("contrived.es") + " --m 2 --v 1.45 --budget 40 --seed 1");
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("uniform"), std::string::npos);
  const auto journal = scratch("journal.jsonl");
  fs::remove(journal);
  const auto a = cli("authsim --m 3 --trials 100 --correct-fraction 0.5 --seed 2 --journal " +
                     journal.string());
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("mean_correct"), std::string::npos);
  EXPECT_FALSE(slurp(journal).empty());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("sweep --bogus").code, 1);
  EXPECT_EQ(cli("sweep --corpus /nonexistent/file --v-grid 1:2:2").code, 1);
  EXPECT_EQ(cli("sweep --corpus " + data("tiny.txt") + " --v-grid 1:2:2").code, 1);
  EXPECT_EQ(cli("solve --corpus " + data("contrived.es") + " --v 1 --q 0.5,0.6").code, 1);
  EXPECT_EQ(cli("optimize --corpus " + data("contrived.es") + " --m 3 --v 1 --budget 3").code, 1);
  EXPECT_EQ(cli("sweep --corpus " + data("contrived.es") + " --v-grid 1:2:0").code, 0);
}

}  // namespace
