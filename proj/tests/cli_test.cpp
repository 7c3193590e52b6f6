#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct Outcome {
  int status = -1;
  std::string out;
};

// Runs the command-line tool with the given arguments (shell-quoted by the caller).
Outcome cli(const std::string& args, const std::string& env = "") {
  Outcome r;
  std::string command = env + (env.empty() ? "" : " ") + CHAINREP_CLI + std::string(" ") + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

nlohmann::ordered_json json(const Outcome& r) { return nlohmann::ordered_json::parse(r.out); }

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, MindimReportsDimension) {
  Outcome r = cli("mindim --sig P1 --formula 'P1(x)' --format json");
  ASSERT_EQ(r.status, 0);
  auto j = json(r);
  EXPECT_EQ(j["result"]["dimension"], 1);
  EXPECT_EQ(j["tool"], "chainrep");
  EXPECT_EQ(j["config"]["seed"], 20261016);
  EXPECT_FALSE(j["result"]["erratum_notes"].empty());
  EXPECT_NE(cli("mindim --sig P1 --formula 'P1(x)'").out.find("dimension: 1\n"), std::string::npos);
}

TEST(Cli, DecideNegativeAnswer) {
  Outcome r = cli("decide --dim 1 --formula 'x<y'");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("minimal dimension 2"), std::string::npos);
  EXPECT_EQ(cli("decide --dim 2 --formula 'x<y'").status, 0);
}

TEST(Cli, SignatureInferredFromFormula) {
  auto j = json(cli("mindim --formula 'P2(x) & x<y' --format json"));
  EXPECT_EQ(j["config"]["signature"], "P1,P2");
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(cli("mindim --formula 'x <'").status, 2);
  EXPECT_EQ(cli("mindim --formula 'x<y' --no-such-flag").status, 2);
  EXPECT_EQ(cli("frobnicate").status, 2);
  EXPECT_EQ(cli("mindim").status, 2);
  EXPECT_EQ(cli("mindim --formula-file /nonexistent/formula.txt").status, 2);
  EXPECT_EQ(cli("mindim --formula 'x<y' --format xml").status, 2);
  EXPECT_EQ(cli("interp-reduce --spec " + write_temp("bad.interp", "component q dim=1\n")).status, 2);
}

TEST(Cli, FormulaFileErrorHasLocation) {
  std::string path = write_temp("bad.formula", "x<y &\n  ~");
  std::string command = std::string(CHAINREP_CLI) + " mindim --formula-file " + path + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  std::array<char, 512> buf{};
  std::string err(buf.data(), fread(buf.data(), 1, buf.size(), pipe));
  EXPECT_EQ(WEXITSTATUS(pclose(pipe)), 2);
  EXPECT_NE(err.find(path + ":2:4:"), std::string::npos) << err;
}

TEST(Cli, ResourceLimit) {
  EXPECT_EQ(cli("mindim --formula 'x<y & y<z' --budget-states 3").status, 3);
  EXPECT_EQ(cli("growth --formula 'x<y' --n 2 --max-len 64").status, 3);
  EXPECT_EQ(cli("monoid --formula 'P1(x) & x<y' --budget-monoid 2").status, 3);
}

TEST(Cli, GrowthSandwich) {
  Outcome r = cli("growth --formula 'x<y' --n 3 --max-len 6 --format json");
  ASSERT_EQ(r.status, 0);
  auto j = json(r);
  EXPECT_EQ(j["result"]["degree"], 2);
  EXPECT_EQ(j["result"]["sandwich"], true);
  EXPECT_EQ(j["result"]["samples"][2]["brute"], 3);
  EXPECT_EQ(j["result"]["witness"]["kind"], "growth-lower");
}

TEST(Cli, WitnessKinds) {
  auto j = json(cli("witness --n 2 --formula 'P1(x)' --format json"));
  EXPECT_EQ(j["result"]["pump"]["count"], 2);
  EXPECT_EQ(j["result"]["no-decrement"]["count"], 4);
  EXPECT_GE(j["result"]["growth-lower"]["count"], 2);
  auto first = json(cli("witness --n 2 --formula '~ex y. y<x' --kind pump --format json"));
  EXPECT_EQ(first["result"]["pump"]["applicable"], false);
  EXPECT_FALSE(first["result"].contains("no-decrement"));
}

TEST(Cli, NormalFormAndMonoid) {
  auto nf = json(cli("normalform --formula 'x<y' --format json"));
  ASSERT_EQ(nf["result"]["cases"].size(), 3u);
  EXPECT_EQ(nf["result"]["cases"][1]["order"], "x < y");
  EXPECT_EQ(nf["result"]["cases"][1]["disjunct_count"], 2);
  auto m = json(cli("monoid --formula 'P1(x)' --format json"));
  EXPECT_EQ(m["result"]["segment_monoid_size"], 3);
}

TEST(Cli, OracleCheck) {
  Outcome r = cli("oracle-check --formula 'P1(x) & x<y & ~(ex z. x<z & z<y)' --max-len 5 --format json");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json(r)["result"]["check"]["ok"], true);
}

TEST(Cli, InterpretationReduce) {
  std::string path = write_temp("succ.interp",
                                "component s dim=2 (x,y)\n"
                                "universe P1(x) & x<y & ~(ex z. x<z & z<y)\n"
                                "relation E/2 on (s,s) (x,y;u,v) := y=u\n");
  auto j = json(cli("interp-reduce --spec " + path + " --format json"));
  EXPECT_EQ(j["result"]["reduced_dimension"], 1);
  EXPECT_EQ(j["result"]["equivalence"]["ok"], true);
  EXPECT_EQ(cli("interp-reduce --spec " + path + " --dim 0").status, 1);
}

TEST(Cli, MemoryBudget) {
  EXPECT_EQ(cli("mindim --formula 'x<y'", "CHAINREP_BUDGET_MB=abc").status, 2);
  EXPECT_EQ(cli("mindim --formula 'x<y'", "CHAINREP_BUDGET_MB=512").status, 0);
}

TEST(Cli, SelftestIsDeterministic) {
  Outcome a = cli("selftest --quick --format json");
  Outcome b = cli("selftest --quick --format json");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  auto j = json(a);
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["criteria"].size(), 9u);
  EXPECT_EQ(json(cli("selftest --quick --seed 5 --format json"))["config"]["seed"], 5);
}

TEST(Cli, ReportsAreByteIdentical) {
  const char* args = "growth --formula 'x<y & P1(y)' --n 3 --max-len 5 --format json";
  EXPECT_EQ(cli(args).out, cli(args).out);
}
