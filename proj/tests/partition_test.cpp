// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "hlsched/benchmarks.hpp"
#include "hlsched/partition.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

namespace hlsched {
namespace {

using test::id;
using test::load_fixture;

Partition only_b_in_hw(const Dfg& g) {
  Partition p(g.size(), Side::Sw);
  p[id(g, "b")] = Side::Hw;
  return p;
}

TEST(PartitionByCycles, DiamondThreshold) {
  Dfg g = load_fixture("diamond.json");
  CostModel cost;
  cost.sw_cycles = {{OpKind::Add, 1}, {OpKind::Mul, 4}};
  EXPECT_EQ(partition_by_cycles(g, cost, 2), only_b_in_hw(g));
  EXPECT_EQ(partition_by_cycles(g, cost, 0), Partition(4, Side::Hw));
  Partition all_sw = partition_by_cycles(g, cost, std::numeric_limits<long long>::max());
  EXPECT_EQ(all_sw, Partition(4, Side::Sw));
  EXPECT_EQ(edge_cut(g, all_sw), 0);
}

TEST(EdgeCut, DiamondAndSymmetry) {
  Dfg g = load_fixture("diamond.json");
  Partition p = only_b_in_hw(g);
  EXPECT_EQ(edge_cut(g, p), 2);
  Partition q = p;
  for (auto& s : q) s = s == Side::Hw ? Side::Sw : Side::Hw;
  EXPECT_EQ(edge_cut(g, q), 2);
}

TEST(BufferSize, DiamondWorkedExample) {
  Dfg g = load_fixture("diamond.json");
  auto b = buffer_size(g, asap(g, {}), only_b_in_hw(g), {});
  EXPECT_EQ(b.peak, 2);
  EXPECT_EQ(b.total, 4);
  auto none = buffer_size(g, asap(g, {}), Partition(4, Side::Sw), {});
  EXPECT_EQ(none.peak, 0);
  EXPECT_EQ(none.total, 0);
}

TEST(SystemDelay, DiamondWorkedExample) {
  Dfg g = load_fixture("diamond.json");
  CostModel cost;
  cost.transfer_cycles = 2;
  Partition p = only_b_in_hw(g);
  auto d = system_delay(g, p, cost);
  EXPECT_EQ(d.delay, 7);
  EXPECT_EQ(d.comm_cost, 4);
  EXPECT_EQ(d.delay, oracle::partition_delay(g, p, cost));
}

TEST(SystemDelay, ZeroTransferEqualsCriticalPath) {
  for (const Dfg& g : {load_fixture("diamond.json"), load_fixture("chain4.json"),
                       ewf_benchmark()}) {
    Partition p(g.size(), Side::Sw);
    for (NodeId v = 0; v < g.size(); v += 2) p[v] = Side::Hw;
    EXPECT_EQ(system_delay(g, p, {}).delay, critical_path_length(g, {}));
  }
}

TEST(SystemDelay, MatchesPathEnumeration) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    Dfg g = oracle::random_dag(rng, 10);
    Partition p(g.size());
    for (auto& s : p) s = rng() % 2 ? Side::Hw : Side::Sw;
    CostModel cost;
    cost.sw_cycles = {{OpKind::Add, 1 + static_cast<int>(rng() % 3)},
                      {OpKind::Mul, 1 + static_cast<int>(rng() % 5)}};
    cost.hw_cycles = {{OpKind::Mul, 1 + static_cast<int>(rng() % 2)}};
    cost.transfer_cycles = static_cast<int>(rng() % 4);
    EXPECT_EQ(system_delay(g, p, cost).delay, oracle::partition_delay(g, p, cost));
  }
}

TEST(PartitionMetrics, DiamondBundle) {
  Dfg g = load_fixture("diamond.json");
  CostModel cost;
  cost.transfer_cycles = 2;
  auto m = partition_metrics(g, asap(g, {}), only_b_in_hw(g), {}, cost);
  EXPECT_EQ(m.edge_cut, 2);
  EXPECT_EQ(m.buffer_peak, 2);
  EXPECT_EQ(m.buffer_total, 4);
  EXPECT_EQ(m.delay, 7);
  EXPECT_EQ(m.comm_cost, 4);
  Json j = partition_to_json(g, only_b_in_hw(g), m, "cycles");
  EXPECT_EQ(j.dump(),
            R"({"strategy":"cycles","sides":{"a":"sw","b":"hw","c":"sw","d":"sw"},)"
            R"("edge_cut":2,"buffer_peak":2,"buffer_total":4,"delay":7,"comm_cost":4})");
}

TEST(PartitionByClique, SingleCliqueOneSide) {
  Dfg g = load_fixture("chain4.json");
  Partition p = partition_by_clique(g, asap(g, {}), {});
  EXPECT_EQ(p, Partition(4, Side::Hw));
}

TEST(PartitionByClique, TwoEqualCliquesSplit) {
  Dfg g;
  auto x = g.add_input("x");
  for (const char* name : {"p", "q"}) {
    auto n = g.add_node(name, OpKind::Add);
    g.add_edge(Source::input(x), n, 0);
    g.add_edge(Source::input(x), n, 1);
    g.add_output(n);
  }
  Partition p = partition_by_clique(g, asap(g, {}), {});
  EXPECT_NE(p[0], p[1]);
}

TEST(PartitionByClique, BalanceWithinLargestClique) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Dfg g = oracle::random_dag(rng, 8);
    LatencyModel lat{{OpKind::Mul, 1 + static_cast<int>(rng() % 3)}};
    Schedule s = asap(g, lat);
    Partition p = partition_by_clique(g, s, lat);
    auto cliques = clique_partition(CompatibilityGraph::from_ops(g, s, lat));
    long long hw = 0, sw = 0, largest = 0;
    for (const auto& c : cliques) {
      long long w = 0;
      for (auto v : c) {
        w += lat(g.op(v));
        EXPECT_EQ(p[v], p[c.front()]);
      }
      largest = std::max(largest, w);
      (p[c.front()] == Side::Hw ? hw : sw) += w;
    }
    EXPECT_LE(std::llabs(hw - sw), largest);
  }
}

}  // namespace
}  // namespace hlsched
