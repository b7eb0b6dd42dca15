// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "hlsched/cli.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

namespace hlsched {
namespace {

using test::fixture_path;
using test::read_file;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("hlsched_" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

TEST(ParseDfg, DiamondFixture) {
  Dfg g = test::load_fixture("diamond.json");
  EXPECT_EQ(g.size(), 4u);
  EXPECT_TRUE(validate(g).empty());
}

TEST(ParseDfg, Errors) {
  EXPECT_THROW(parse_dfg("{"), ParseError);
  EXPECT_THROW(parse_dfg("[]"), ParseError);
  EXPECT_THROW(parse_dfg(R"({"inputs":[],"nodes":[]})"), ParseError);
  EXPECT_THROW(parse_dfg(R"({"inputs":[1],"nodes":[],"edges":[],"outputs":[]})"),
               ParseError);
  EXPECT_THROW(
      parse_dfg(R"({"inputs":[],"nodes":[{"name":"n","op":"div"}],"edges":[],"outputs":[]})"),
      ParseError);
  EXPECT_THROW(parse_dfg(R"({"inputs":["x"],"nodes":[{"name":"n","op":"neg"}],)"
                         R"("edges":[{"from":"x","to":"n","port":"0"}],"outputs":["n"]})"),
               ParseError);
}

TEST(ParseDfg, DuplicateNameIsValidationError) {
  std::string text = R"({"inputs":["x"],"nodes":[{"name":"n","op":"neg"},{"name":"n","op":"neg"}],)"
                     R"("edges":[{"from":"x","to":"n","port":0}],"outputs":["n"]})";
  EXPECT_THROW(parse_dfg(text), ValidationError);
}

TEST(ParseDfg, UnknownNamesReported) {
  std::string text = R"({"inputs":["x"],"nodes":[{"name":"n","op":"neg"}],)"
                     R"("edges":[{"from":"y","to":"n","port":0}],"outputs":["m"]})";
  try {
    parse_dfg(text);
    FAIL();
  } catch (const ValidationError& e) {
    std::string all;
    for (const auto& v : e.violations()) all += v + "\n";
    EXPECT_NE(all.find("edges[0].from"), std::string::npos);
    EXPECT_NE(all.find("outputs[0]"), std::string::npos);
  }
}

TEST(ParseDfg, RoundTripFixtures) {
  for (const char* f : {"diamond.json", "chain4.json", "ewf.json"}) {
    Dfg g = test::load_fixture(f);
    EXPECT_EQ(parse_dfg(serialize_dfg(g)), g) << f;
  }
  std::mt19937 rng(4);
  for (int i = 0; i < 100; ++i) {
    Dfg g = oracle::random_dag(rng, 15, false);
    EXPECT_EQ(parse_dfg(serialize_dfg(g)), g);
  }
}

TEST(ParseDfg, FuzzedFixturesNeverCrash) {
  const std::string base = read_file(fixture_path("ewf.json"));
  std::mt19937 rng(2024);
  const std::string alphabet = "{}[]\",:0123456789-abcxyz \n";
  for (int i = 0; i < 300; ++i) {
    std::string t = base;
    const int edits = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < edits && !t.empty(); ++k) {
      std::size_t pos = rng() % t.size();
      switch (rng() % 3) {
        case 0: t[pos] = alphabet[rng() % alphabet.size()]; break;
        case 1: t.erase(pos, 1 + rng() % 8); break;
        default: t.insert(pos, 1, alphabet[rng() % alphabet.size()]);
      }
    }
    try {
      parse_dfg(t);
    } catch (const Error&) {
    }
  }
}

TEST(Cli, ScheduleChain4Asap) {
  auto r = run({"schedule", "--input", fixture_path("chain4.json"), "--alg", "asap"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("length: 4"), std::string::npos) << r.out;
}

TEST(Cli, ScheduleEwfJson) {
  auto r = run({"schedule", "--input", "ewf", "--alg", "mbs", "--add", "3", "--mul",
                "2", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["length"], 14);
  EXPECT_EQ(j["fu_usage"]["add"], 3);
  EXPECT_EQ(j["fu_usage"]["mul"], 2);

  auto s = run({"schedule", "--input", "ewf", "--alg", "saa", "--add", "4", "--mul",
                "2", "--format", "json"});
  ASSERT_EQ(s.code, 0) << s.err;
  Json k = Json::parse(s.out);
  EXPECT_EQ(k["length"], 13);
  EXPECT_EQ(k["baseline_length"], 14);
  EXPECT_TRUE(k["transform"]["applied"].get<bool>());
}

TEST(Cli, EveryAlgorithmRuns) {
  for (const auto& alg : cli::kAlgorithms)
    for (const char* fmt : {"table", "json"}) {
      auto r = run({"schedule", "--input", "ewf", "--alg", alg, "--add", "2", "--mul",
                    "1", "--format", fmt, "--latency", "mul=2"});
      EXPECT_EQ(r.code, 0) << alg << " " << r.err;
    }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"schedule"}).code, 1);
  EXPECT_EQ(run({"schedule", "--input", "no/such/file.json"}).code, 1);
  EXPECT_EQ(run({"schedule", "--input", "ewf", "--alg", "bogus"}).code, 1);
  EXPECT_EQ(run({"schedule", "--input", "ewf", "--add", "0"}).code, 1);
  EXPECT_EQ(run({"schedule", "--input", "ewf", "--latency", "add=0"}).code, 1);
  EXPECT_EQ(run({"compare", "--input", "ewf", "--algs", "asap,bogus"}).code, 1);
  EXPECT_EQ(run({"schedule", "--input", temp_file("bad.json", "{nope"), "--alg",
                 "asap"}).code,
            1);
  auto inf = run({"schedule", "--input", "ewf", "--alg", "fds", "--deadline", "5"});
  EXPECT_EQ(inf.code, 2);
  EXPECT_NE(inf.err.find("error"), std::string::npos);
  EXPECT_EQ(run({"schedule", "--input", "ewf", "--alg", "alap", "--deadline", "3"}).code,
            2);
}

TEST(Cli, CompareChain4Asap) {
  auto r = run({"compare", "--input", fixture_path("chain4.json"), "--algs", "asap",
                "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["rows"][0]["control_steps"], 4);
  EXPECT_EQ(j["rows"][0]["fu_total"], 1);
}

std::string strip_runtime(const std::string& table) {
  std::istringstream in(table);
  std::string line, out;
  while (std::getline(in, line)) {
    auto end = line.find_last_not_of(' ');
    auto cut = line.find_last_of(' ', end);
    out += line.substr(0, cut) + "\n";
  }
  return out;
}

TEST(Cli, CompareTableAndJsonAgree) {
  std::vector<std::string> base = {"compare", "--input", "ewf", "--add", "4",
                                   "--mul", "2", "--algs", "asap,alap,mbs,saa"};
  auto table = run(base);
  auto again = run(base);
  ASSERT_EQ(table.code, 0) << table.err;
  EXPECT_EQ(strip_runtime(table.out), strip_runtime(again.out));
  base.insert(base.end(), {"--format", "json"});
  auto json = run(base);
  Json j = Json::parse(json.out);
  std::istringstream in(table.out);
  std::string header;
  std::getline(in, header);
  for (const auto& row : j["rows"]) {
    std::string alg;
    int add, mul, steps, fu, regs;
    std::string unconstrained;
    in >> alg >> add >> mul >> steps >> fu >> regs >> unconstrained;
    std::string rest;
    std::getline(in, rest);
    EXPECT_EQ(alg, row["algorithm"]);
    EXPECT_EQ(add, row["add"]);
    EXPECT_EQ(mul, row["mul"]);
    EXPECT_EQ(steps, row["control_steps"]);
    EXPECT_EQ(fu, row["fu_total"]);
    EXPECT_EQ(regs, row["registers"]);
  }
}

TEST(Cli, AllocateReportsBothConventions) {
  auto r = run({"allocate", "--input", "ewf", "--alg", "saa", "--add", "4", "--mul",
                "2", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["fu_total"], 6);
  EXPECT_LE(j["registers"].get<int>(), 13);
  EXPECT_GE(j["registers_with_inputs"].get<int>(), j["registers"].get<int>());
}

TEST(Cli, Partition) {
  auto r = run({"partition", "--input", "ewf", "--strategy", "cycles", "--threshold",
                "2", "--sw", "add=1,mul=4", "--transfer", "2", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  for (const char* k : {"edge_cut", "buffer_peak", "buffer_total", "delay", "comm_cost"})
    EXPECT_GE(j[k].get<int>(), 0) << k;
  EXPECT_GT(j["edge_cut"].get<int>(), 0);

  auto all_hw = run({"partition", "--input", "ewf", "--strategy", "cycles",
                     "--threshold", "0", "--format", "json"});
  ASSERT_EQ(all_hw.code, 0) << all_hw.err;
  EXPECT_EQ(Json::parse(all_hw.out)["edge_cut"], 0);

  auto clique = run({"partition", "--input", "ewf", "--strategy", "clique"});
  EXPECT_EQ(clique.code, 0) << clique.err;
}

}  // namespace
}  // namespace hlsched
