// End-to-end runs of the hardy_lab executable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string output;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hardy_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Outcome lab(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / ("hardy_cli_" + std::to_string(std::hash<std::string>{}(args)) + ".txt");
  const std::string cmd = std::string(HARDY_LAB) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, ListHasTheCatalogue) {
  const auto r = lab("list");
  EXPECT_EQ(r.status, 0);
  int lines = 0;
  for (char c : r.output) lines += c == '\n';
  EXPECT_GE(lines, 8);
  EXPECT_NE(r.output.find("boundary-dichotomy"), std::string::npos);
}

TEST(Cli, DescribeShowsReferenceAndRejectsUnknownIds) {
  const auto r = lab("describe certify-T");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.output.find("certify_T_on_atom"), std::string::npos);
  EXPECT_NE(r.output.find("alpha_min"), std::string::npos);
  EXPECT_EQ(lab("describe no-such-thing").status, 2);
}

TEST(Cli, InvalidInvocationsExitTwo) {
  const auto dir = scratch("invalid");
  EXPECT_EQ(lab("run certify-T --config " + (dir / "missing.file").string()).status, 2);
  EXPECT_EQ(lab("run nope --out " + dir.string()).status, 2);
  EXPECT_EQ(lab("run counterexample-T --n 2 --out " + dir.string()).status, 2);
  EXPECT_EQ(lab("run counterexample-T --tmax 16 --out " + dir.string()).status, 2);
  EXPECT_EQ(lab("run certify-T --seed notanumber").status, 2);
  write(dir / "bad.cfg", "samplez = 3\n");
  EXPECT_EQ(lab("run certify-T --config " + (dir / "bad.cfg").string() + " --out " + dir.string()).status, 2);
  write(dir / "garbled.cfg", "just text\n");
  EXPECT_EQ(lab("run certify-T --config " + (dir / "garbled.cfg").string() + " --out " + dir.string()).status, 2);
}

TEST(Cli, CounterexampleWritesGrowthTable) {
  const auto dir = scratch("growth");
  const auto r = lab("run counterexample-T --tmax 256 --out " + dir.string());
  ASSERT_EQ(r.status, 0) << r.output;
  const auto csv = slurp(dir / "counterexample-T_growth.csv");
  EXPECT_EQ(csv.rfind("T,I_T\r\n8,", 0), 0u);
  const auto j = nlohmann::json::parse(slurp(dir / "counterexample-T.json"));
  EXPECT_GT(j.at("measured").at("slope").get<double>(), 0.0);
  EXPECT_TRUE(j.at("pass").get<bool>());
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m.at("config").at("tmax").at("source"), "flag");
  EXPECT_EQ(m.at("experiments").at(0).at("artifacts").size(), 3u);
}

TEST(Cli, GateFailureExitsOne) {
  const auto dir = scratch("gate");
  write(dir / "strict.cfg", "dyadic_tol = 0.001\n");
  const auto r = lab("run counterexample-T --config " + (dir / "strict.cfg").string() + " --out " + dir.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("FAIL counterexample-T"), std::string::npos);
}

TEST(Cli, FlagsWinOverConfig) {
  const auto dir = scratch("flags");
  write(dir / "run.cfg", "# small run\nsamples = 2\nseed = 3\nannuli = 4\n");
  const auto r = lab("run certify-T --config " + (dir / "run.cfg").string() + " --seed 7 --n 1 --out " + dir.string());
  ASSERT_EQ(r.status, 0) << r.output;
  const auto j = nlohmann::json::parse(slurp(dir / "certify-T.json"));
  EXPECT_EQ(j.at("parameters").at("seed").at("value"), "7");
  EXPECT_EQ(j.at("parameters").at("seed").at("source"), "flag");
  EXPECT_EQ(j.at("parameters").at("samples").at("source"), "config");
  EXPECT_EQ(j.at("parameters").at("alpha").at("source"), "default");
}

TEST(Cli, SameConfigAndSeedGiveIdenticalBytes) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  write(a / "run.cfg", "samples = 2\nannuli = 4\n");
  const std::string args = "run certify-T --seed 7 --config " + (a / "run.cfg").string();
  ASSERT_EQ(lab(args + " --out " + a.string()).status, 0);
  ASSERT_EQ(lab(args + " --out " + b.string()).status, 0);
  EXPECT_EQ(slurp(a / "certify-T.json"), slurp(b / "certify-T.json"));
  EXPECT_EQ(slurp(a / "certify-T_atoms.csv"), slurp(b / "certify-T_atoms.csv"));
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
}
