// SPDX-License-Identifier: Apache-2.0
//
// Binding of a scheduled graph: value lifetimes, register sharing by the
// left-edge algorithm and by clique partitioning, and FU instance binding.
//
// Lifetimes are closed intervals of control steps. A value that dies in
// step s conflicts with one born in step s.

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hlsched/schedule.hpp"

namespace hlsched {

struct Lifetime {
  Source value;  // producing node or primary input
  int birth = 0;
  int death = 0;

  bool overlaps(const Lifetime& o) const {
    return birth <= o.death && o.birth <= death;
  }
  int length() const { return death - birth + 1; }

  bool operator==(const Lifetime&) const = default;
};

/// Lifetime of every node result (and, optionally, every primary input).
/// A result is born in the last step of its producer and dies at its last
/// consumer's start; primary outputs live until the end of the schedule.
inline std::vector<Lifetime> lifetimes(const Dfg& g, const Schedule& s,
                                       const LatencyModel& lat,
                                       bool include_primary_inputs = false) {
  std::vector<Lifetime> out;
  if (include_primary_inputs) {
    for (InputId i = 0; i < g.inputs().size(); ++i) {
      Lifetime lt{Source::input(i), 0, 0};
      for (const Edge& e : g.edges())
        if (e.src == lt.value) lt.death = std::max(lt.death, s.start[e.dst]);
      out.push_back(lt);
    }
  }
  for (NodeId v = 0; v < g.size(); ++v) {
    Lifetime lt{Source::node(v), s.start[v] + lat(g.op(v)) - 1, 0};
    lt.death = lt.birth;
    for (NodeId w : g.succs(v)) lt.death = std::max(lt.death, s.start[w]);
    if (g.is_output(v)) lt.death = std::max(lt.death, s.length);
    out.push_back(lt);
  }
  return out;
}

/// Max number of simultaneously live intervals.
inline int max_overlap(const std::vector<Lifetime>& iv) {
  std::map<int, int> delta;
  for (const auto& l : iv) {
    ++delta[l.birth];
    --delta[l.death + 1];
  }
  int cur = 0, best = 0;
  for (auto [t, d] : delta) best = std::max(best, cur += d);
  return best;
}

struct RegisterBinding {
  std::vector<int> reg;  // parallel to the interval list
  int register_count = 0;
};

/// Left-edge packing: by birth (ties keep input order), each interval goes
/// to the lowest register whose last death is before its birth.
inline RegisterBinding left_edge(const std::vector<Lifetime>& iv) {
  std::vector<std::size_t> idx(iv.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return iv[a].birth < iv[b].birth;
  });
  RegisterBinding rb;
  rb.reg.assign(iv.size(), -1);
  std::vector<int> last_death;
  for (std::size_t i : idx) {
    std::size_t r = 0;
    while (r < last_death.size() && last_death[r] >= iv[i].birth) ++r;
    if (r == last_death.size()) last_death.push_back(iv[i].death);
    else last_death[r] = iv[i].death;
    rb.reg[i] = static_cast<int>(r);
  }
  rb.register_count = static_cast<int>(last_death.size());
  return rb;
}

struct FuInstance {
  OpKind kind = OpKind::Add;
  int index = 0;

  bool operator==(const FuInstance&) const = default;
};

struct FuBinding {
  std::vector<FuInstance> instance;  // indexed by node id
  std::map<OpKind, int> count;
};

/// Left-edge over op occupation intervals, separately per kind.
inline FuBinding bind_fus(const Dfg& g, const Schedule& s,
                          const LatencyModel& lat) {
  FuBinding fb;
  fb.instance.resize(g.size());
  std::map<OpKind, std::vector<NodeId>> by_kind;
  for (NodeId v = 0; v < g.size(); ++v) by_kind[g.op(v)].push_back(v);
  for (auto& [k, ops] : by_kind) {
    std::vector<Lifetime> busy;
    for (NodeId v : ops)
      busy.push_back({Source::node(v), s.start[v], s.start[v] + lat(k) - 1});
    auto rb = left_edge(busy);
    for (std::size_t i = 0; i < ops.size(); ++i)
      fb.instance[ops[i]] = {k, rb.reg[i]};
    fb.count[k] = rb.register_count;
  }
  return fb;
}

/// Undirected graph; an edge means the two items may share a resource.
class CompatibilityGraph {
 public:
  explicit CompatibilityGraph(std::size_t n = 0)
      : adj_(n, std::vector<char>(n, 0)) {}

  std::size_t size() const noexcept { return adj_.size(); }

  void connect(std::size_t a, std::size_t b) {
    if (a == b) return;
    adj_.at(a).at(b) = adj_.at(b).at(a) = 1;
  }
  bool compatible(std::size_t a, std::size_t b) const { return adj_[a][b]; }

  /// Values sharing a register: disjoint lifetimes.
  static CompatibilityGraph from_lifetimes(const std::vector<Lifetime>& iv) {
    CompatibilityGraph cg(iv.size());
    for (std::size_t i = 0; i < iv.size(); ++i)
      for (std::size_t j = i + 1; j < iv.size(); ++j)
        if (!iv[i].overlaps(iv[j])) cg.connect(i, j);
    return cg;
  }

  /// Ops sharing an FU: same kind, disjoint occupation.
  static CompatibilityGraph from_ops(const Dfg& g, const Schedule& s,
                                     const LatencyModel& lat) {
    CompatibilityGraph cg(g.size());
    for (NodeId a = 0; a < g.size(); ++a)
      for (NodeId b = a + 1; b < g.size(); ++b) {
        if (g.op(a) != g.op(b)) continue;
        Lifetime x{Source::node(a), s.start[a], s.start[a] + lat(g.op(a)) - 1};
        Lifetime y{Source::node(b), s.start[b], s.start[b] + lat(g.op(b)) - 1};
        if (!x.overlaps(y)) cg.connect(a, b);
      }
    return cg;
  }

 private:
  std::vector<std::vector<char>> adj_;
};

using Clique = std::vector<std::size_t>;

/// Greedy clique partitioning: repeatedly merge the compatible pair of
/// groups with the most common neighbours (ties: lowest ids). A merged
/// group stays compatible only with vertices compatible with all members.
inline std::vector<Clique> clique_partition(const CompatibilityGraph& cg) {
  const std::size_t n = cg.size();
  std::vector<Clique> group(n);
  std::vector<char> alive(n, 1);
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    group[i] = {i};
    for (std::size_t j = 0; j < n; ++j) adj[i][j] = cg.compatible(i, j);
  }

  for (;;) {
    long best_common = -1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j] || !adj[i][j]) continue;
        long common = 0;
        for (std::size_t k = 0; k < n; ++k)
          common += alive[k] && adj[i][k] && adj[j][k];
        if (common > best_common) {
          best_common = common;
          bi = i;
          bj = j;
        }
      }
    }
    if (best_common < 0) break;
    group[bi].insert(group[bi].end(), group[bj].begin(), group[bj].end());
    std::sort(group[bi].begin(), group[bi].end());
    alive[bj] = 0;
    for (std::size_t k = 0; k < n; ++k) {
      adj[bi][k] = adj[k][bi] = adj[bi][k] && adj[bj][k];
      adj[bj][k] = adj[k][bj] = 0;
    }
  }

  std::vector<Clique> out;
  for (std::size_t i = 0; i < n; ++i)
    if (alive[i]) out.push_back(group[i]);
  return out;
}

/// One row of the allocation comparison plus the bindings behind it.
struct AllocationResult {
  FuUsage fu;
  int fu_total = 0;
  int registers = 0;              // left-edge, primary inputs excluded
  int registers_with_inputs = 0;  // left-edge, primary inputs included
  int clique_registers = 0;       // clique partitioning, inputs excluded
  std::vector<Lifetime> lifetimes;
  RegisterBinding registers_binding;
  FuBinding fu_binding;
};

inline AllocationResult allocation_report(const Dfg& g, const Schedule& s,
                                          const LatencyModel& lat) {
  AllocationResult r;
  r.fu = fu_usage(g, s, lat);
  r.fu_total = hlsched::fu_total(r.fu);
  r.lifetimes = lifetimes(g, s, lat, false);
  r.registers_binding = left_edge(r.lifetimes);
  r.registers = r.registers_binding.register_count;
  r.registers_with_inputs =
      left_edge(lifetimes(g, s, lat, true)).register_count;
  r.clique_registers = static_cast<int>(
      clique_partition(CompatibilityGraph::from_lifetimes(r.lifetimes)).size());
  r.fu_binding = bind_fus(g, s, lat);
  return r;
}

}  // namespace hlsched
