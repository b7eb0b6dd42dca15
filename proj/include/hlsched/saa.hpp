// SPDX-License-Identifier: Apache-2.0
//
// Scheduling-and-allocation transform: merge same-kind dependency chains,
// rebuild each chain as a balanced tree (most serial form -> most parallel
// form), list-schedule the result by mobility, then pull critical ops into
// earlier steps that still have FU budget.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hlsched/schedule.hpp"

namespace hlsched {

/// A serial run of one associative op kind. Every node but the sink has a
/// single outgoing edge, into the next node.
struct Chain {
  std::vector<NodeId> nodes;
  OpKind kind = OpKind::Add;
  std::vector<Source> inputs;  // the k + 1 operands from outside the chain
  NodeId sink = 0;

  bool operator==(const Chain&) const = default;
};

/// Edge u -> v on a critical path that a rebalance removed.
struct Cut {
  NodeId from = 0;
  NodeId to = 0;

  bool operator==(const Cut&) const = default;
};

struct Move {
  NodeId node = 0;
  int from_step = 0;
  int to_step = 0;

  bool operator==(const Move&) const = default;
};

struct SaaResult {
  Dfg graph;
  Schedule schedule;
  std::vector<Chain> chains;
  std::vector<Cut> cuts;
  std::vector<Move> moves;
  int baseline_length = 0;
  int final_length = 0;
  bool transform_applied = false;
};

namespace detail {

// Unit-latency depth of every node.
inline std::vector<int> depth(const Dfg& g) {
  std::vector<int> d(g.size(), 1);
  for (NodeId v : topo_order(g))
    for (NodeId p : g.preds(v)) d[v] = std::max(d[v], d[p] + 1);
  return d;
}

}  // namespace detail

/// All maximal chains (length >= 2). When two operands of a node could
/// extend a chain, the deeper one is taken (ties: lower id). A node with
/// fanout above one, or that is a primary output, ends its chain.
inline std::vector<Chain> find_chains(const Dfg& g) {
  require_operational(g);
  const auto d = detail::depth(g);
  const std::size_t n = g.size();

  auto linkable = [&](NodeId p, NodeId v) {
    return is_associative(g.op(v)) && g.op(p) == g.op(v) && g.fanout(p) == 1 &&
           !g.is_output(p);
  };

  std::vector<std::optional<NodeId>> link(n);  // chain predecessor
  std::vector<char> has_next(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    std::optional<NodeId> best;
    for (NodeId p : g.preds(v)) {
      if (!linkable(p, v)) continue;
      if (!best || d[p] > d[*best]) best = p;
    }
    if (best) {
      link[v] = best;
      has_next[*best] = 1;
    }
  }

  std::vector<Chain> out;
  for (NodeId v = 0; v < n; ++v) {
    if (!link[v] || has_next[v]) continue;
    Chain c;
    c.kind = g.op(v);
    c.sink = v;
    for (std::optional<NodeId> u = v; u; u = link[*u]) c.nodes.push_back(*u);
    std::reverse(c.nodes.begin(), c.nodes.end());
    const NodeId head = c.nodes.front();
    c.inputs.push_back(*g.operand(head, 0));
    c.inputs.push_back(*g.operand(head, 1));
    for (std::size_t i = 1; i < c.nodes.size(); ++i) {
      const Source prev = Source::node(c.nodes[i - 1]);
      Source a = *g.operand(c.nodes[i], 0);
      c.inputs.push_back(a == prev ? *g.operand(c.nodes[i], 1) : a);
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Chain& a, const Chain& b) {
    return a.nodes.front() < b.nodes.front();
  });
  return out;
}

/// Replaces the chain by a balanced binary tree over the same external
/// inputs, taken left to right. The sink keeps its id and becomes the root;
/// the other chain ids are reused for inner tree nodes in post-order.
inline Dfg rebalance_chain(const Dfg& g, const Chain& chain) {
  if (!is_associative(chain.kind))
    throw NonAssociativeKind(std::string(to_string(chain.kind)));
  if (chain.nodes.size() < 2 || chain.inputs.size() != chain.nodes.size() + 1)
    throw Error("malformed chain");

  std::vector<char> in_chain(g.size(), 0);
  for (NodeId v : chain.nodes) in_chain.at(v) = 1;

  Dfg out;
  for (const auto& in : g.inputs()) out.add_input(in);
  for (const Node& nd : g.nodes()) out.add_node(nd.name, nd.cls, nd.op);
  for (const Edge& e : g.edges())
    if (!in_chain[e.dst]) out.add_edge(e.src, e.dst, e.dst_port);

  std::size_t next_free = 0;  // into chain.nodes, skipping the sink
  auto take_id = [&]() {
    if (chain.nodes[next_free] == chain.sink) ++next_free;
    return chain.nodes[next_free++];
  };
  auto build = [&](auto&& self, std::size_t lo, std::size_t hi,
                   std::optional<NodeId> id) -> Source {
    if (hi - lo == 1) return chain.inputs[lo];
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    Source l = self(self, lo, mid, std::nullopt);
    Source r = self(self, mid, hi, std::nullopt);
    NodeId v = id ? *id : take_id();
    out.add_edge(l, v, 0);
    out.add_edge(r, v, 1);
    return Source::node(v);
  };
  build(build, 0, chain.inputs.size(), chain.sink);

  for (NodeId o : g.outputs()) out.add_output(o);
  return out;
}

/// Shift critical ops one step earlier while their predecessors allow it and
/// the destination step has spare FU budget, until nothing moves.
inline Schedule cut_and_move(const Dfg& g, const Schedule& sched,
                             const LatencyModel& lat,
                             const ResourceConstraints& rc,
                             std::vector<Move>* log = nullptr) {
  const std::size_t n = g.size();
  const auto order = topo_order(g);
  std::vector<std::vector<NodeId>> preds(n), succs(n);
  for (NodeId v = 0; v < n; ++v) {
    preds[v] = g.preds(v);
    succs[v] = g.succs(v);
  }
  Schedule s = sched;

  for (;;) {
    // Critical in the scheduled sense: finishes last, or feeds a critical op
    // that starts right after it.
    std::vector<char> crit(n, 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId v = *it;
      const int end = s.start[v] + lat(g.op(v)) - 1;
      crit[v] = end == s.length;
      for (NodeId w : succs[v])
        if (crit[w] && s.start[w] == end + 1) crit[v] = 1;
    }
    std::vector<NodeId> cand;
    for (NodeId v = 0; v < n; ++v)
      if (crit[v]) cand.push_back(v);
    std::stable_sort(cand.begin(), cand.end(), [&](NodeId a, NodeId b) {
      return s.start[a] < s.start[b];
    });

    bool moved = false;
    for (NodeId v : cand) {
      const int dest = s.start[v] - 1;
      if (dest < 1) continue;
      bool ready = std::all_of(preds[v].begin(), preds[v].end(), [&](NodeId p) {
        return s.start[p] + lat(g.op(p)) - 1 < dest;
      });
      if (!ready) continue;
      const OpKind k = g.op(v);
      int in_use = 0;
      for (NodeId u = 0; u < n; ++u)
        if (u != v && g.op(u) == k && s.start[u] <= dest &&
            dest <= s.start[u] + lat(k) - 1)
          ++in_use;
      if (!rc.allows(k, in_use)) continue;
      if (log) log->push_back({v, s.start[v], dest});
      s.start[v] = dest;
      s.length = schedule_length(g, s.start, lat);
      moved = true;
      break;
    }
    if (!moved) return s;
  }
}

/// The full transform. If rebalancing does not pay off under the given
/// budget the untransformed graph is kept, so the result is never longer
/// than the MBS baseline.
inline SaaResult saa(const Dfg& g, const LatencyModel& lat,
                     const ResourceConstraints& rc) {
  require_operational(g);
  SaaResult r;
  const Schedule baseline = mbs(g, lat, rc);
  r.baseline_length = baseline.length;

  const auto chains = find_chains(g);
  const auto early = asap(g, lat);
  const auto slack = mobility(early, alap(g, lat));
  std::vector<Cut> cuts;
  Dfg t = g;
  for (const Chain& c : chains) {
    for (std::size_t i = 0; i + 1 < c.nodes.size(); ++i) {
      NodeId u = c.nodes[i], v = c.nodes[i + 1];
      if (slack[u] == 0 && slack[v] == 0 &&
          early.start[v] == early.start[u] + lat(g.op(u)))
        cuts.push_back({u, v});
    }
    t = rebalance_chain(t, c);
  }

  std::vector<Move> moves;
  Schedule s = cut_and_move(t, mbs(t, lat, rc), lat, rc, &moves);
  if (!chains.empty() && s.length < baseline.length) {
    r.graph = std::move(t);
    r.chains = chains;
    r.cuts = std::move(cuts);
    r.transform_applied = true;
  } else {
    moves.clear();
    s = cut_and_move(g, baseline, lat, rc, &moves);
    r.graph = g;
  }
  r.schedule = std::move(s);
  r.moves = std::move(moves);
  r.final_length = r.schedule.length;
  return r;
}

}  // namespace hlsched
