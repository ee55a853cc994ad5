// Copyright 2026 The collective-qsv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cqsv/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

#include "cqsv/circuit.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result cqsv_run(std::vector<std::string> args) {
  args.insert(args.begin(), "cqsv");
  std::ostringstream out, err;
  Result r;
  r.code = cqsv::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path tmp(const std::string& name) {
  const fs::path dir = fs::path(CQSV_TEST_TMPDIR);
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Table {
  std::string version;
  std::vector<std::string> columns;
  std::vector<std::map<std::string, std::string>> rows;

  double num(std::size_t row, const std::string& column) const { return std::stod(rows.at(row).at(column)); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table parse_csv(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::getline(in, table.version);
  std::string line;
  std::getline(in, line);
  table.columns = split(line);
  while (std::getline(in, line)) {
    const auto fields = split(line);
    EXPECT_EQ(fields.size(), table.columns.size()) << line;
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < fields.size() && i < table.columns.size(); ++i) row[table.columns[i]] = fields[i];
    table.rows.push_back(row);
  }
  return table;
}

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) { ::setenv("CQSV_THREADS", value, 1); }
  ~ThreadsEnv() { ::unsetenv("CQSV_THREADS"); }
};

}  // namespace

TEST(cli, analytic_schema_and_n_opt_column) {
  const Result r = cqsv_run({"analytic", "--k", "2,10", "--epsilon", "0.01,0.001", "--noise", "in,cn"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  EXPECT_EQ(t.version, "# collective-qsv v1");
  const std::vector<std::string> columns = {"k", "t", "noise", "lambda", "epsilon", "delta", "p_exact",
                                            "p_closed_form", "rounds_M", "samples_N", "output_infidelity",
                                            "pass_rate", "ci_low", "ci_high", "seed", "n_opt", "flags"};
  EXPECT_EQ(t.columns, columns);
  ASSERT_EQ(t.rows.size(), 8u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double eps = t.num(i, "epsilon");
    EXPECT_EQ(t.num(i, "n_opt"), std::ceil(std::log(100.0) / eps));
  }
  // rows sorted by (k, t, noise, epsilon)
  EXPECT_EQ(t.rows[0].at("k"), "2");
  EXPECT_EQ(t.rows[0].at("noise"), "IN");
  EXPECT_EQ(t.rows[0].at("epsilon"), "0.001");
  EXPECT_EQ(t.rows[7].at("k"), "10");
  EXPECT_EQ(t.rows[7].at("noise"), "CN");
}

TEST(cli, analytic_bell_counts) {
  const Result r = cqsv_run({"analytic", "--k", "2", "--epsilon", "0.01", "--noise", "in"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  // eps^-1 ln delta^-1 / (4/3)
  EXPECT_EQ(t.num(0, "samples_N"), std::ceil(0.75 * std::log(100.0) / 0.01));
  EXPECT_NEAR(t.num(0, "p_closed_form"), 0.986722222222, 1e-11);
}

TEST(cli, analytic_dicke_curves_decrease_in_epsilon) {
  std::vector<std::string> args = {"analytic", "--target", "dicke:100:50", "--lambda", "0.995",
                                    "--k", "2,10", "--noise", "in", "--epsilon"};
  std::string eps;
  for (int i = 0; i <= 12; ++i) eps += (i ? "," : "") + std::to_string(std::pow(10.0, -4.0 + 0.25 * i));
  args.push_back(eps);
  const Result r = cqsv_run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 26u);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (t.rows[i].at("k") != t.rows[i - 1].at("k")) continue;
    EXPECT_LE(t.num(i, "samples_N"), t.num(i - 1, "samples_N"));
    EXPECT_LE(t.num(i, "samples_N"), t.num(i, "n_opt"));
  }
}

TEST(cli, usage_errors_exit_2) {
  EXPECT_EQ(cqsv_run({"analytic", "--epsilon", "0.01"}).code, 2);  // no schemes
  EXPECT_EQ(cqsv_run({"analytic", "--k", "2"}).code, 2);           // no epsilon
  EXPECT_EQ(cqsv_run({"analytic", "--k", "2", "--epsilon", "0.01", "--target", "ghz:3"}).code, 2);  // no lambda
  EXPECT_EQ(cqsv_run({"analytic", "--k", "2", "--epsilon", "0.01", "--target", "qutrit"}).code, 2);
  EXPECT_EQ(cqsv_run({"analytic", "--k", "2", "--t", "3", "--epsilon", "0.01"}).code, 2);
  EXPECT_EQ(cqsv_run({"analytic", "--k", "2", "--epsilon", "0.01", "--mode", "second_order"}).code, 2);
  EXPECT_EQ(cqsv_run({"analytic", "--k", "2", "--epsilon", "x"}).code, 2);
  EXPECT_EQ(cqsv_run({"bogus"}).code, 2);
  EXPECT_EQ(cqsv_run({}).code, 2);
  {
    ThreadsEnv env("zero");
    EXPECT_EQ(cqsv_run({"simulate", "--k", "2", "--epsilon", "0.01", "--rounds", "10"}).code, 2);
  }
  EXPECT_EQ(cqsv_run({"--help"}).code, 0);
}

TEST(cli, config_file_with_flag_override) {
  const fs::path ini = tmp("analytic.ini");
  std::ofstream(ini) << "[analytic]\nk = 2\nepsilon = 0.01\nnoise = in\n";
  Result r = cqsv_run({"--config", ini.string(), "analytic"});
  ASSERT_EQ(r.code, 0) << r.err;
  Table t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].at("epsilon"), "0.01");

  r = cqsv_run({"--config", ini.string(), "analytic", "--epsilon", "0.02"});
  ASSERT_EQ(r.code, 0) << r.err;
  t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].at("epsilon"), "0.02");
}

TEST(cli, simulate_is_byte_identical_for_a_fixed_seed) {
  const fs::path a = tmp("sim_a.csv"), b = tmp("sim_b.csv");
  const std::vector<std::string> common = {"simulate", "--k", "2,3", "--t", "1", "--epsilon", "0.01,0.1",
                                           "--noise", "in,cn", "--rounds", "2000", "--seed", "42"};
  {
    ThreadsEnv env("1");
    auto args = common;
    args.insert(args.end(), {"--out", a.string()});
    ASSERT_EQ(cqsv_run(args).code, 0);
  }
  {
    ThreadsEnv env("3");
    auto args = common;
    args.insert(args.end(), {"--out", b.string()});
    ASSERT_EQ(cqsv_run(args).code, 0);
  }
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
}

TEST(cli, simulate_bell_pass_rate_interval_covers_closed_form) {
  const Result r = cqsv_run({"simulate", "--k", "2", "--epsilon", "0.01", "--rounds", "100000", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  const double p = t.num(0, "p_closed_form");
  EXPECT_NEAR(p, 0.986722222222, 1e-11);
  EXPECT_NEAR(t.num(0, "p_exact"), p, 1e-10);
  EXPECT_LE(t.num(0, "ci_low"), p);
  EXPECT_GE(t.num(0, "ci_high"), p);
  EXPECT_NEAR(t.num(0, "output_infidelity"), 0.0050391306795788525, 1e-11);
}

TEST(cli, simulate_dimension_overflow_exits_3) {
  const Result r =
      cqsv_run({"simulate", "--k", "3", "--epsilon", "0.01", "--rounds", "10", "--max-dimension", "16"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("cap"), std::string::npos);
}

TEST(cli, compile_counts_and_round_trip) {
  const fs::path small = tmp("k2n1.txt");
  Result r = cqsv_run({"compile", "--k", "2", "-n", "1", "--out", small.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string text = slurp(small);
  std::size_t fredkin_lines = 0;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) fredkin_lines += line.rfind("FREDKIN ", 0) == 0;
  EXPECT_EQ(fredkin_lines, 1u);

  const fs::path big = tmp("k3n2.txt");
  r = cqsv_run({"compile", "--k", "3", "-n", "2", "--verify", "--out", big.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("fredkins=4\n"), std::string::npos);
  EXPECT_NE(r.out.find("fredkin_bound_nk=6\n"), std::string::npos);
  EXPECT_NE(r.out.find("two_qubit=20\n"), std::string::npos);
  const cqsv::Circuit parsed = cqsv::parse_circuit(slurp(big));
  EXPECT_EQ(parsed, cqsv::lower_to_fredkin(cqsv::build_cswap_chain(3, 2)));

  r = cqsv_run({"compile", "--k", "3", "-n", "1", "--level", "gates", "--verify", "--out", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(cqsv::parse_circuit(r.out).counts().two_qubit_generic, 10u);

  r = cqsv_run({"compile", "--party-qubits", "1,1", "--verify", "--out", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("verify_max_deviation="), std::string::npos);

  EXPECT_EQ(cqsv_run({"compile", "--k", "3", "--level", "qasm"}).code, 2);
}

TEST(cli, discriminate_significances) {
  // p_IN(4, 1, 1/3, 0.05, d = 4)
  const double a = 1.0 - 0.05 + 0.05 / 3.0;
  const double f_in = (a + std::pow(0.95, 4) + std::pow(0.05, 4) / 3.0 / 27.0) / 2.0;
  char rate[64];
  std::snprintf(rate, sizeof(rate), "%.17g", f_in);
  const Result r = cqsv_run({"discriminate", "--observed", rate, "--samples", "10000", "--k", "4", "--t", "1",
                             "--epsilon", "0.05", "--mode", "exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  std::map<std::string, double> sig;
  for (std::size_t i = 0; i < t.rows.size(); ++i) sig[t.rows[i].at("noise")] = t.num(i, "significance");
  EXPECT_EQ(sig.at("IN"), 1.0);
  EXPECT_LT(sig.at("CN"), 0.05);

  EXPECT_EQ(cqsv_run({"discriminate", "--observed", "1.5", "--samples", "100", "--k", "4", "--epsilon", "0.05"}).code,
            2);
  EXPECT_EQ(cqsv_run({"discriminate", "--observed", "nan", "--samples", "100", "--k", "4", "--epsilon", "0.05"}).code,
            2);
  EXPECT_EQ(cqsv_run({"discriminate", "--samples", "100", "--k", "4", "--epsilon", "0.05"}).code, 2);
}

TEST(cli, figures_shapes) {
  const fs::path dir = tmp("figures");
  Result r = cqsv_run({"figures", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"complexity_vs_epsilon.csv", "complexity_vs_k.csv", "complexity_vs_t.csv",
                           "infidelity_vs_k.csv"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }

  const Table by_t = parse_csv(slurp(dir / "complexity_vs_t.csv"));
  std::map<std::string, std::vector<double>> samples;
  for (std::size_t i = 0; i < by_t.rows.size(); ++i) {
    EXPECT_EQ(by_t.rows[i].at("k"), "20");
    EXPECT_EQ(by_t.rows[i].at("mode"), "exact");
    if (!by_t.rows[i].at("samples_real").empty()) samples[by_t.rows[i].at("noise")].push_back(by_t.num(i, "samples_real"));
  }
  for (const char* kind : {"IN", "MIX", "CN"}) {
    const auto& n = samples.at(kind);
    ASSERT_EQ(n.size(), 20u) << kind;
    for (std::size_t i = 1; i < n.size(); ++i) EXPECT_GT(n[i], n[i - 1]) << kind << " t=" << i + 1;
  }
  const auto& gu = samples.at("GU");
  ASSERT_EQ(gu.size(), 20u);
  for (std::size_t i = 1; i < gu.size(); ++i) EXPECT_LT(gu[i], gu[i - 1]);
  EXPECT_GT(gu.back() / gu.front(), 0.9);

  const fs::path small = tmp("figures_small_eps");
  r = cqsv_run({"figures", "--out", small.string(), "--epsilon", "0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table eps_k = parse_csv(slurp(small / "infidelity_vs_k.csv"));
  std::size_t seen = 0;
  for (std::size_t i = 0; i < eps_k.rows.size(); ++i) {
    if (eps_k.rows[i].at("noise") != "IN") continue;
    ++seen;
    const double ratio = eps_k.num(i, "output_infidelity") / 0.0005;
    EXPECT_GT(ratio, 1.0);
    EXPECT_LT(ratio, 1.02);
  }
  EXPECT_EQ(seen, 19u);

  EXPECT_EQ(cqsv_run({"figures"}).code, 2);
}
