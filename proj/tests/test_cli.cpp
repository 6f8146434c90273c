#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "smoothbl/core.hpp"

// Runs the built CLI as a subprocess and inspects output and exit codes.

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(SMOOTHBL_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string demo(const std::string& name) { return std::string(SMOOTHBL_DEMO_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& text) {
  const std::string path = std::string(SMOOTHBL_TMP_DIR) + "/" + name;
  std::ofstream(path) << text;
  return path;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l))
    if (!l.empty()) v.push_back(l);
  return v;
}

std::vector<double> csv_row(const std::string& l) {
  std::vector<double> v;
  std::stringstream ss(l);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  return v;
}

nlohmann::json as_json(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST(Cli, GbllReportOnDemo) {
  const auto r = run("--json gbll " + demo("dsbs.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = as_json(r);
  EXPECT_GE(j["d"].get<double>(), j["d_star"].get<double>() - 1e-9);
  EXPECT_EQ(j["audit"], "ok");
  EXPECT_TRUE(j["maximizer"].contains("0"));  // labelled by the file

  // --tensor-n reports per-letter values; d tensorizes
  const auto two = as_json(run("--json gbll " + demo("dsbs.json") + " --tensor-n 2"));
  EXPECT_NEAR(two["d"].get<double>(), j["d"].get<double>(), 1e-6);
  const auto bits = as_json(run("--json --bits gbll " + demo("dsbs.json")));
  EXPECT_NEAR(bits["d"].get<double>(), j["d"].get<double>() / smoothbl::kLn2, 1e-12);
  EXPECT_EQ(bits["units"], "bits");

  const auto sm = as_json(run("--json gbll " + demo("binary_identity.json") + " --delta 0.2"));
  EXPECT_NEAR(sm["d"].get<double>(), std::log(5.0), 1e-9);
  EXPECT_LE(sm["d_delta"].get<double>(), sm["d"].get<double>() + 1e-9);
}

TEST(Cli, SchemaErrorsExitTwo) {
  auto r = run("gbll " + temp_file("malformed.json", "{\n \"kind\": \"discrete-gbll\",\n \"mu\": [0.5,, 0.5]\n}"), true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;
  r = run("gbll " + temp_file("badrow.json", R"({"kind": "discrete-gbll", "mu": [0.5, 0.5],
    "channels": [[[0.9, 0.2], [0.1, 0.9]]], "weights": [1]})"),
          true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("/channels/0/0"), std::string::npos) << r.out;
  // right file, wrong command
  EXPECT_EQ(run("gaussian " + demo("dsbs.json")).code, 2);
}

TEST(Cli, RegionCsv) {
  auto r = run("region " + demo("dsbs.json") + " --c-grid 2 --rj 0.1");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "c_1,dstar,R_max");
  auto row = csv_row(ls[1]);
  EXPECT_NEAR(row[2], (row[1] + 2.0 * 0.1) / (2.0 - 1.0), 1e-9);

  r = run("region " + demo("dsbs.json"));
  EXPECT_EQ(lines(r.out), std::vector<std::string>{"c_1,dstar,R_max"});

  // rows follow the grid order; each satisfies the R_max formula
  r = run("region " + demo("dsbs.json") + " --c-grid '1.5;2;4;8' --rj 0.05");
  ls = lines(r.out);
  ASSERT_EQ(ls.size(), 5u);
  const double cs[] = {1.5, 2.0, 4.0, 8.0};
  for (std::size_t i = 1; i < ls.size(); ++i) {
    row = csv_row(ls[i]);
    EXPECT_EQ(row[0], cs[i - 1]);
    EXPECT_NEAR(row[2], (row[1] + row[0] * 0.05) / (row[0] - 1.0), 1e-9);
  }
}

TEST(Cli, CertifyVerdictsAndCodes) {
  auto r = run("certify " + demo("dsbs_binning.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict: SOUND"), std::string::npos);
  r = run("certify " + demo("dsbs_binning.json") + " --d 100");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("vacuous"), std::string::npos);
  r = run("certify " + temp_file("big.json", R"({"kind": "cr-scheme", "n": 14, "source": [0.4, 0.1, 0.1, 0.4],
    "alphabets": [2, 2], "k_size": 2, "w_sizes": [1, 1], "binning": {}})"));
  EXPECT_EQ(r.code, 3);
  // an observed TV below a valid bound can only come from a wrong input; the CLI flags it
  r = run("certify " + temp_file("unsound.json", R"({"kind": "bounds-query", "queries": [
    {"bound": "omni", "k_size": 1024, "w_sizes": [2], "weights": [2], "d": 0, "delta": 0, "actual": 0.5}]})"));
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("UNSOUND"), std::string::npos);
  r = run("certify " + demo("bounds.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.9365234375"), std::string::npos);
}

TEST(Cli, SimulateBatch) {
  const auto r = run("simulate " + demo("dsbs_binning.json") + " --schemes 20 --seed 4");
  EXPECT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 21u);
  for (std::size_t i = 1; i < ls.size(); ++i) EXPECT_NE(ls[i].find("SOUND"), std::string::npos);
}

TEST(Cli, SecondOrder) {
  const std::string args = "second-order " + demo("gaussian_scalar.json") + " --d1 0.5 --d2 0.5 --seed 7";
  const auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("V: 1\n"), std::string::npos) << a.out;
  EXPECT_EQ(run(args + " --samples 0").code, 1);
  EXPECT_EQ(run("second-order " + demo("gaussian_scalar.json") + " --d1 1.5 --d2 0.5").code, 1);
  EXPECT_EQ(run("second-order " + demo("gaussian_scalar.json") + " --d2 0.5").code, 1);
}

TEST(Cli, GaussianAndSelftest) {
  const auto g = as_json(run("--json gaussian " + demo("gaussian_pair.json")));
  EXPECT_NEAR(g["F_sigma"].get<double>() + g["C"].get<double>(), g["d_star"].get<double>(), 1e-9);
  EXPECT_GE(g["d_star"].get<double>(), -1e-12);
  // V = tr((I - diag(c) Sigma)^2) / 2 with c = (0.6, 0.7), unit variances, correlation 0.5
  EXPECT_NEAR(g["V"].get<double>(), 0.5 * (0.16 + 2 * 0.3 * 0.35 + 0.09), 1e-9);
  const auto s = run("selftest");
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(s.out.find("FAIL"), std::string::npos);
}
