// SPDX-License-Identifier: Apache-2.0
//
// Two-way hardware/software partitioning of a scheduled graph and the
// communication metrics of a partition.

#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string_view>
#include <vector>

#include "hlsched/allocation.hpp"

namespace hlsched {

enum class Side : std::uint8_t { Hw, Sw };

constexpr std::string_view to_string(Side s) noexcept {
  return s == Side::Hw ? "hw" : "sw";
}

using Partition = std::vector<Side>;  // indexed by node id

/// Cycle cost of each op kind on either side, plus the cost of moving one
/// value across the boundary. Unlisted kinds cost one cycle.
struct CostModel {
  std::map<OpKind, int> sw_cycles;
  std::map<OpKind, int> hw_cycles;
  int transfer_cycles = 0;

  int sw(OpKind k) const { return lookup(sw_cycles, k); }
  int hw(OpKind k) const { return lookup(hw_cycles, k); }
  int cycles(OpKind k, Side s) const { return s == Side::Hw ? hw(k) : sw(k); }

 private:
  static int lookup(const std::map<OpKind, int>& m, OpKind k) {
    auto it = m.find(k);
    return it == m.end() ? 1 : it->second;
  }
};

struct PartitionMetrics {
  int edge_cut = 0;
  int buffer_peak = 0;
  int buffer_total = 0;
  int delay = 0;
  int comm_cost = 0;
};

/// Ops whose software cost reaches the threshold go to hardware.
inline Partition partition_by_cycles(const Dfg& g, const CostModel& cost,
                                     long long threshold) {
  Partition p(g.size());
  for (NodeId v = 0; v < g.size(); ++v)
    p[v] = cost.sw(g.op(v)) >= threshold ? Side::Hw : Side::Sw;
  return p;
}

/// Clique-partition the op compatibility graph, then place whole cliques
/// largest first (by total cycles, ties by lowest member) on the lighter
/// side, hardware on a tie.
inline Partition partition_by_clique(const Dfg& g, const Schedule& s,
                                     const LatencyModel& lat) {
  auto cliques = clique_partition(CompatibilityGraph::from_ops(g, s, lat));
  auto weight = [&](const Clique& c) {
    long long w = 0;
    for (auto v : c) w += lat(g.op(v));
    return w;
  };
  std::stable_sort(cliques.begin(), cliques.end(),
                   [&](const Clique& a, const Clique& b) {
                     return weight(a) > weight(b);
                   });
  Partition p(g.size(), Side::Sw);
  long long hw = 0, sw = 0;
  for (const auto& c : cliques) {
    Side side = hw <= sw ? Side::Hw : Side::Sw;
    (side == Side::Hw ? hw : sw) += weight(c);
    for (auto v : c) p[v] = side;
  }
  return p;
}

inline bool crosses(const Edge& e, const Partition& p) {
  return e.src.is_node() && p[e.src.index] != p[e.dst];
}

/// Node-to-node edges with endpoints on different sides.
inline int edge_cut(const Dfg& g, const Partition& p) {
  return static_cast<int>(std::count_if(
      g.edges().begin(), g.edges().end(),
      [&](const Edge& e) { return crosses(e, p); }));
}

struct BufferSize {
  int peak = 0;
  int total = 0;
};

/// Buffering needed for values that cross the boundary: peak simultaneous
/// crossing values and total value-steps.
inline BufferSize buffer_size(const Dfg& g, const Schedule& s,
                              const Partition& p, const LatencyModel& lat) {
  std::vector<char> crossing(g.size(), 0);
  for (const Edge& e : g.edges())
    if (crosses(e, p)) crossing[e.src.index] = 1;
  std::vector<Lifetime> live;
  for (const Lifetime& lt : lifetimes(g, s, lat, false))
    if (crossing[lt.value.index]) live.push_back(lt);
  BufferSize b;
  b.peak = max_overlap(live);
  for (const auto& lt : live) b.total += lt.length();
  return b;
}

struct SystemDelay {
  int delay = 0;
  int comm_cost = 0;
};

/// Longest path with per-side op costs and a transfer charge on every
/// crossing edge.
inline SystemDelay system_delay(const Dfg& g, const Partition& p,
                                const CostModel& cost) {
  std::vector<int> finish(g.size(), 0);
  SystemDelay d;
  for (NodeId v : topo_order(g)) {
    int ready = 0;
    for (const Edge& e : g.edges()) {
      if (e.dst != v || !e.src.is_node()) continue;
      int t = finish[e.src.index] + (crosses(e, p) ? cost.transfer_cycles : 0);
      ready = std::max(ready, t);
    }
    finish[v] = ready + cost.cycles(g.op(v), p[v]);
    d.delay = std::max(d.delay, finish[v]);
  }
  d.comm_cost = edge_cut(g, p) * cost.transfer_cycles;
  return d;
}

/// Schedule-aware overload matching the metric bundle.
inline SystemDelay system_delay(const Dfg& g, const Schedule&,
                                const Partition& p, const CostModel& cost) {
  return system_delay(g, p, cost);
}

inline PartitionMetrics partition_metrics(const Dfg& g, const Schedule& s,
                                          const Partition& p,
                                          const LatencyModel& lat,
                                          const CostModel& cost) {
  PartitionMetrics m;
  m.edge_cut = edge_cut(g, p);
  auto b = buffer_size(g, s, p, lat);
  m.buffer_peak = b.peak;
  m.buffer_total = b.total;
  auto d = system_delay(g, p, cost);
  m.delay = d.delay;
  m.comm_cost = d.comm_cost;
  return m;
}

}  // namespace hlsched
