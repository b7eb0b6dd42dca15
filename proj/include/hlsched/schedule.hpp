// SPDX-License-Identifier: Apache-2.0
//
// Schedules, resource constraints and the constructive schedulers: ASAP,
// ALAP, mobility and resource-constrained list scheduling (with the
// mobility-priority variant, MBS).

#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hlsched/dfg.hpp"

namespace hlsched {

/// Control-step assignment. Steps start at 1; start is indexed by node id.
struct Schedule {
  std::vector<int> start;
  int length = 0;

  bool operator==(const Schedule&) const = default;
};

/// Length implied by a start map: max over nodes of start + latency - 1.
inline int schedule_length(const Dfg& g, const std::vector<int>& start,
                           const LatencyModel& lat) {
  int len = 0;
  for (NodeId v = 0; v < g.size(); ++v)
    len = std::max(len, start[v] + lat(g.op(v)) - 1);
  return len;
}

inline Schedule make_schedule(const Dfg& g, std::vector<int> start,
                              const LatencyModel& lat) {
  int len = schedule_length(g, start, lat);
  return Schedule{std::move(start), len};
}

/// Per-kind FU budget. Kinds without an entry are unlimited.
class ResourceConstraints {
 public:
  ResourceConstraints() = default;
  ResourceConstraints(std::initializer_list<std::pair<const OpKind, int>> init) {
    for (auto [k, c] : init) set(k, c);
  }

  static ResourceConstraints unlimited() { return {}; }

  void set(OpKind k, int count) {
    if (count < 1) throw Error("resource count must be at least 1");
    limit_[k] = count;
  }
  void set_unlimited(OpKind k) { limit_.erase(k); }

  std::optional<int> limit(OpKind k) const {
    auto it = limit_.find(k);
    if (it == limit_.end()) return std::nullopt;
    return it->second;
  }

  bool allows(OpKind k, int in_use) const {
    auto l = limit(k);
    return !l || in_use < *l;
  }

  const std::map<OpKind, int>& limits() const noexcept { return limit_; }

 private:
  std::map<OpKind, int> limit_;
};

using FuUsage = std::map<OpKind, int>;

/// Max concurrent ops per kind; multi-cycle ops occupy every step they run.
inline FuUsage fu_usage(const Dfg& g, const Schedule& s,
                        const LatencyModel& lat) {
  std::map<OpKind, std::vector<int>> busy;
  for (NodeId v = 0; v < g.size(); ++v) {
    OpKind k = g.op(v);
    auto& row = busy[k];
    int last = s.start[v] + lat(k) - 1;
    if (static_cast<int>(row.size()) <= last) row.resize(last + 1, 0);
    for (int t = s.start[v]; t <= last; ++t) ++row[t];
  }
  FuUsage out;
  for (auto& [k, row] : busy) out[k] = *std::max_element(row.begin(), row.end());
  return out;
}

inline int fu_total(const FuUsage& u) {
  int t = 0;
  for (auto& [k, c] : u) t += c;
  return t;
}

/// Precedence and resource violations of a schedule; empty when it is legal.
inline std::vector<std::string> check_schedule(
    const Dfg& g, const Schedule& s, const LatencyModel& lat,
    const ResourceConstraints& rc = {}) {
  std::vector<std::string> out;
  if (s.start.size() != g.size()) {
    out.push_back("schedule covers " + std::to_string(s.start.size()) +
                  " nodes, graph has " + std::to_string(g.size()));
    return out;
  }
  for (NodeId v = 0; v < g.size(); ++v)
    if (s.start[v] < 1) out.push_back("node '" + g.node(v).name + "' before step 1");
  for (const Edge& e : g.edges()) {
    if (!e.src.is_node()) continue;
    NodeId u = e.src.index;
    if (s.start[e.dst] < s.start[u] + lat(g.op(u)))
      out.push_back("precedence " + g.node(u).name + "->" + g.node(e.dst).name);
  }
  if (s.length != schedule_length(g, s.start, lat))
    out.push_back("length inconsistent with start map");
  for (auto [k, used] : fu_usage(g, s, lat))
    if (auto l = rc.limit(k); l && used > *l)
      out.push_back("kind " + std::string(to_string(k)) + " uses " +
                    std::to_string(used) + " > " + std::to_string(*l));
  return out;
}

/// Earliest start for every node.
inline Schedule asap(const Dfg& g, const LatencyModel& lat) {
  require_operational(g);
  std::vector<int> start(g.size(), 1);
  for (NodeId v : topo_order(g))
    for (NodeId p : g.preds(v))
      start[v] = std::max(start[v], start[p] + lat(g.op(p)));
  return make_schedule(g, std::move(start), lat);
}

/// Latest start for every node such that everything finishes by deadline.
/// A deadline of nullopt means the ASAP length.
inline Schedule alap(const Dfg& g, const LatencyModel& lat,
                     std::optional<int> deadline = std::nullopt) {
  require_operational(g);
  const int cp = critical_path_length(g, lat);
  const int d = deadline.value_or(cp);
  if (d < cp) throw InfeasibleDeadline(d, cp);
  auto order = topo_order(g);
  std::vector<int> start(g.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId v = *it;
    int latest = d - lat(g.op(v)) + 1;
    for (NodeId s : g.succs(v))
      latest = std::min(latest, start[s] - lat(g.op(v)));
    start[v] = latest;
  }
  return make_schedule(g, std::move(start), lat);
}

using MobilityMap = std::vector<int>;

inline MobilityMap mobility(const Schedule& early, const Schedule& late) {
  if (early.start.size() != late.start.size()) throw NodeSetMismatch();
  MobilityMap m(early.start.size());
  for (std::size_t v = 0; v < m.size(); ++v) {
    m[v] = late.start[v] - early.start[v];
    if (m[v] < 0) throw Error("ALAP start precedes ASAP start");
  }
  return m;
}

/// Static list-scheduling priority: lower key first, ties by node id.
struct PriorityRule {
  std::string name;
  std::vector<long long> key;  // indexed by node id

  static PriorityRule by_id(const Dfg& g) {
    return {"id", std::vector<long long>(g.size(), 0)};
  }
  static PriorityRule by_mobility(const Dfg& g, const LatencyModel& lat) {
    auto m = mobility(asap(g, lat), alap(g, lat));
    return {"mobility", {m.begin(), m.end()}};
  }
  static PriorityRule by_asap(const Dfg& g, const LatencyModel& lat) {
    auto s = asap(g, lat).start;
    return {"asap", {s.begin(), s.end()}};
  }
  static PriorityRule by_alap(const Dfg& g, const LatencyModel& lat) {
    auto s = alap(g, lat).start;
    return {"alap", {s.begin(), s.end()}};
  }
};

/// Generic constructive list scheduler. `order` receives the current step,
/// the ready list (ascending ids) and the partial start map (0 = unplaced)
/// and must return the ready ops sorted by priority.
template <class OrderFn>
Schedule list_schedule_with(const Dfg& g, const LatencyModel& lat,
                            const ResourceConstraints& rc, OrderFn&& order) {
  require_operational(g);
  topo_order(g);  // throws CyclicGraph
  const std::size_t n = g.size();
  std::vector<std::vector<NodeId>> preds(n);
  for (NodeId v = 0; v < n; ++v) preds[v] = g.preds(v);

  std::vector<int> start(n, 0);
  std::map<OpKind, std::vector<int>> busy;  // kind -> per-step occupancy
  std::size_t placed = 0;
  for (int step = 1; placed < n; ++step) {
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < n; ++v) {
      if (start[v]) continue;
      bool ok = std::all_of(preds[v].begin(), preds[v].end(), [&](NodeId p) {
        return start[p] && start[p] + lat(g.op(p)) - 1 < step;
      });
      if (ok) ready.push_back(v);
    }
    if (ready.empty()) continue;
    std::vector<NodeId> ranked = order(step, std::as_const(ready),
                                       std::as_const(start));
    for (NodeId v : ranked) {
      OpKind k = g.op(v);
      const int l = lat(k);
      auto& row = busy[k];
      if (static_cast<int>(row.size()) < step + l) row.resize(step + l, 0);
      bool fits = true;
      for (int t = step; t < step + l; ++t) fits = fits && rc.allows(k, row[t]);
      if (!fits) continue;
      for (int t = step; t < step + l; ++t) ++row[t];
      start[v] = step;
      ++placed;
    }
  }
  return make_schedule(g, std::move(start), lat);
}

inline Schedule list_schedule(const Dfg& g, const LatencyModel& lat,
                              const ResourceConstraints& rc,
                              const PriorityRule& priority) {
  if (priority.key.size() != g.size()) throw NodeSetMismatch();
  return list_schedule_with(
      g, lat, rc,
      [&](int, const std::vector<NodeId>& ready, const std::vector<int>&) {
        std::vector<NodeId> r = ready;
        std::stable_sort(r.begin(), r.end(), [&](NodeId a, NodeId b) {
          return priority.key[a] < priority.key[b];
        });
        return r;
      });
}

/// Mobility-based shift scheduling: list scheduling, least mobility first.
inline Schedule mbs(const Dfg& g, const LatencyModel& lat,
                    const ResourceConstraints& rc) {
  return list_schedule(g, lat, rc, PriorityRule::by_mobility(g, lat));
}

}  // namespace hlsched
