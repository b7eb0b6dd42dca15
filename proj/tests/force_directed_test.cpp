// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "hlsched/benchmarks.hpp"
#include "hlsched/force_directed.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

namespace hlsched {
namespace {

using test::by_name;
using test::load_fixture;

TEST(TimeFrames, MatchAsapAlapWhenNothingFixed) {
  Dfg dia = load_fixture("diamond.json");
  auto f = time_frames(dia, {}, 4, std::vector<int>(4, 0));
  EXPECT_EQ(f.earliest, asap(dia, {}).start);
  EXPECT_EQ(f.latest, alap(dia, {}, 4).start);
}

TEST(TimeFrames, PinPropagates) {
  Dfg dia = load_fixture("diamond.json");
  std::vector<int> fixed(4, 0);
  fixed[test::id(dia, "a")] = 2;
  auto f = time_frames(dia, {}, 4, fixed);
  EXPECT_EQ(f.earliest[test::id(dia, "c")], 3);
  EXPECT_EQ(f.latest[test::id(dia, "a")], 2);
}

TEST(DistributionGraph, HandValuesOnDiamond) {
  Dfg dia = load_fixture("diamond.json");
  auto f = time_frames(dia, {}, 4, std::vector<int>(4, 0));
  auto dg = distribution_graph(dia, {}, f);
  // a in [1,2], c in [2,3], d in [3,4]: 1/2 each.
  EXPECT_DOUBLE_EQ(dg.at(OpKind::Add, 1), 0.5);
  EXPECT_DOUBLE_EQ(dg.at(OpKind::Add, 2), 1.0);
  EXPECT_DOUBLE_EQ(dg.at(OpKind::Add, 3), 1.0);
  EXPECT_DOUBLE_EQ(dg.at(OpKind::Add, 4), 0.5);
  EXPECT_DOUBLE_EQ(dg.at(OpKind::Mul, 2), 0.5);
  EXPECT_DOUBLE_EQ(dg.at(OpKind::Mul, 3), 0.5);
}

TEST(DistributionGraph, RowSumsEqualOpCounts) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Dfg g = oracle::random_dag(rng, 12);
    const int cp = critical_path_length(g, {});
    const int deadline = cp + static_cast<int>(rng() % 4);
    auto dg = distribution_graph(
        g, {}, time_frames(g, {}, deadline, std::vector<int>(g.size(), 0)));
    std::map<OpKind, int> count;
    for (NodeId v = 0; v < g.size(); ++v) ++count[g.op(v)];
    for (auto [k, c] : count) EXPECT_NEAR(dg.sum(k), c, 1e-9);
  }
}

TEST(DistributionGraph, MultiCycleRowsScaleWithLatency) {
  Dfg ewf = ewf_benchmark();
  LatencyModel lat{{OpKind::Mul, 2}};
  auto dg = distribution_graph(
      ewf, lat, time_frames(ewf, lat, 19, std::vector<int>(ewf.size(), 0)));
  EXPECT_NEAR(dg.sum(OpKind::Add), 26.0, 1e-9);
  EXPECT_NEAR(dg.sum(OpKind::Mul), 16.0, 1e-9);
}

TEST(Fds, ChainHasUniqueSchedule) {
  Dfg chain = load_fixture("chain4.json");
  auto r = fds(chain, {}, 4);
  EXPECT_EQ(r.schedule, asap(chain, {}));
  EXPECT_EQ(r.fu_usage, (FuUsage{{OpKind::Add, 1}}));
}

TEST(Fds, SeparatesIndependentOps) {
  Dfg g;
  auto x = g.add_input("x");
  for (const char* name : {"p", "q"}) {
    auto n = g.add_node(name, OpKind::Add);
    g.add_edge(Source::input(x), n, 0);
    g.add_edge(Source::input(x), n, 1);
    g.add_output(n);
  }
  auto r = fds(g, {}, 2);
  EXPECT_EQ(by_name(g, r.schedule), (std::map<std::string, int>{{"p", 1}, {"q", 2}}));
  EXPECT_EQ(r.fu_usage, (FuUsage{{OpKind::Add, 1}}));
}

TEST(Fds, InfeasibleDeadline) {
  EXPECT_THROW(fds(load_fixture("diamond.json"), {}, 2), InfeasibleDeadline);
}

TEST(Fds, EwfDeadline17) {
  Dfg ewf = ewf_benchmark();
  auto r = fds(ewf, {}, 17);
  EXPECT_TRUE(check_schedule(ewf, r.schedule, {}).empty());
  EXPECT_LE(r.schedule.length, 17);
  EXPECT_LE(fu_total(r.fu_usage), 8);
  const int mbs_total =
      fu_total(fu_usage(ewf, mbs(ewf, {}, {{OpKind::Add, 3}, {OpKind::Mul, 2}}), {}));
  EXPECT_LE(fu_total(r.fu_usage), mbs_total);
}

TEST(Fds, MeetsDeadlineOnRandomGraphs) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Dfg g = oracle::random_dag(rng, 10);
    LatencyModel lat{{OpKind::Mul, 1 + static_cast<int>(rng() % 2)}};
    const int deadline = critical_path_length(g, lat) + static_cast<int>(rng() % 3);
    auto r = fds(g, lat, deadline);
    EXPECT_TRUE(check_schedule(g, r.schedule, lat).empty());
    EXPECT_LE(r.schedule.length, deadline);
    EXPECT_EQ(r.fu_usage, fu_usage(g, r.schedule, lat));
  }
}

TEST(Fdls, Fixtures) {
  Dfg chain = load_fixture("chain4.json");
  EXPECT_EQ(fdls(chain, {}, {{OpKind::Add, 1}}).length, 4);
  Dfg dia = load_fixture("diamond.json");
  EXPECT_EQ(fdls(dia, {}, {}), asap(dia, {}));
  EXPECT_EQ(fdls(dia, {}, {}).length, 3);
}

TEST(Fdls, EwfWithinBounds) {
  Dfg ewf = ewf_benchmark();
  ResourceConstraints rc{{OpKind::Add, 3}, {OpKind::Mul, 2}};
  Schedule s = fdls(ewf, {}, rc);
  EXPECT_TRUE(check_schedule(ewf, s, {}, rc).empty());
  EXPECT_GE(s.length, 14);
  EXPECT_LE(s.length, 17);
}

}  // namespace
}  // namespace hlsched
