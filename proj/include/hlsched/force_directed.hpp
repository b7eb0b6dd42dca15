// SPDX-License-Identifier: Apache-2.0
//
// Force-directed scheduling. FDS is the time-constrained variant (fix the
// lowest-force assignment until every op has a single legal step); FDLS
// uses force as the priority of a resource-constrained list scheduler.
//
// Forces are computed over every op whose time frame changes when an
// assignment is tentatively fixed, which covers the classical self,
// predecessor and successor terms transitively.

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "hlsched/schedule.hpp"

namespace hlsched {

/// Legal start window [earliest, latest] for each node.
struct TimeFrames {
  std::vector<int> earliest;
  std::vector<int> latest;

  int width(NodeId v) const { return latest[v] - earliest[v] + 1; }
};

/// Frames under a deadline. fixed[v] > 0 pins v to that step; every free
/// node starts no earlier than min_start. Frames may be empty
/// (earliest > latest) when the pins are inconsistent.
inline TimeFrames time_frames(const Dfg& g, const LatencyModel& lat,
                              int deadline, const std::vector<int>& fixed,
                              int min_start = 1) {
  const auto order = topo_order(g);
  TimeFrames f{std::vector<int>(g.size(), 1), std::vector<int>(g.size(), 0)};
  for (NodeId v : order) {
    int e = fixed[v] ? fixed[v] : min_start;
    for (NodeId p : g.preds(v)) e = std::max(e, f.earliest[p] + lat(g.op(p)));
    f.earliest[v] = fixed[v] ? std::max(fixed[v], e) : e;
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId v = *it;
    int l = deadline - lat(g.op(v)) + 1;
    for (NodeId s : g.succs(v)) l = std::min(l, f.latest[s] - lat(g.op(v)));
    f.latest[v] = fixed[v] ? std::min(fixed[v], l) : l;
  }
  return f;
}

/// Expected FU occupancy per kind and control step (index 0 unused).
struct DistributionGraph {
  int horizon = 0;
  std::map<OpKind, std::vector<double>> usage;

  double at(OpKind k, int step) const {
    auto it = usage.find(k);
    if (it == usage.end() || step < 1 || step >= static_cast<int>(it->second.size()))
      return 0.0;
    return it->second[step];
  }

  double sum(OpKind k) const {
    auto it = usage.find(k);
    if (it == usage.end()) return 0.0;
    double s = 0;
    for (double x : it->second) s += x;
    return s;
  }
};

namespace detail {

// Adds weight * P(v occupies t) to row for every step t.
inline void spread(std::vector<double>& row, int earliest, int latest, int l,
                   double weight) {
  const int w = latest - earliest + 1;
  if (w <= 0) return;
  const double p = weight / w;
  for (int s = earliest; s <= latest; ++s)
    for (int t = s; t < s + l; ++t) {
      if (t >= static_cast<int>(row.size())) row.resize(t + 1, 0.0);
      row[t] += p;
    }
}

}  // namespace detail

/// Each op spreads probability 1 uniformly over its start window; a
/// multi-cycle op contributes to every step it would occupy, so a kind's row
/// sums to the op count times its latency.
inline DistributionGraph distribution_graph(const Dfg& g,
                                            const LatencyModel& lat,
                                            const TimeFrames& f) {
  DistributionGraph dg;
  for (NodeId v = 0; v < g.size(); ++v) {
    OpKind k = g.op(v);
    auto& row = dg.usage[k];
    detail::spread(row, f.earliest[v], f.latest[v], lat(k), 1.0);
    dg.horizon = std::max(dg.horizon, f.latest[v] + lat(k) - 1);
  }
  for (auto& [k, row] : dg.usage)
    if (static_cast<int>(row.size()) < dg.horizon + 1) row.resize(dg.horizon + 1, 0.0);
  return dg;
}

/// Force of moving from frames `before` to `after`: sum over changed ops of
/// DG(t) * (new occupancy probability - old occupancy probability).
inline double frame_change_force(const Dfg& g, const LatencyModel& lat,
                                 const DistributionGraph& dg,
                                 const TimeFrames& before,
                                 const TimeFrames& after) {
  double force = 0;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (before.earliest[v] == after.earliest[v] &&
        before.latest[v] == after.latest[v])
      continue;
    OpKind k = g.op(v);
    std::vector<double> delta(dg.horizon + 2, 0.0);
    detail::spread(delta, after.earliest[v], after.latest[v], lat(k), 1.0);
    detail::spread(delta, before.earliest[v], before.latest[v], lat(k), -1.0);
    for (int t = 1; t < static_cast<int>(delta.size()); ++t)
      force += dg.at(k, t) * delta[t];
  }
  return force;
}

struct FdsResult {
  Schedule schedule;
  FuUsage fu_usage;
};

/// Time-constrained force-directed scheduling.
inline FdsResult fds(const Dfg& g, const LatencyModel& lat, int deadline) {
  require_operational(g);
  const int cp = critical_path_length(g, lat);
  if (deadline < cp) throw InfeasibleDeadline(deadline, cp);

  std::vector<int> fixed(g.size(), 0);
  constexpr double kEps = 1e-12;
  for (;;) {
    TimeFrames cur = time_frames(g, lat, deadline, fixed);
    DistributionGraph dg = distribution_graph(g, lat, cur);
    std::optional<NodeId> best_v;
    int best_step = 0;
    double best_force = 0;
    for (NodeId v = 0; v < g.size(); ++v) {
      if (fixed[v] || cur.width(v) <= 1) continue;
      for (int s = cur.earliest[v]; s <= cur.latest[v]; ++s) {
        fixed[v] = s;
        TimeFrames next = time_frames(g, lat, deadline, fixed);
        fixed[v] = 0;
        double f = frame_change_force(g, lat, dg, cur, next);
        if (!best_v || f < best_force - kEps) {
          best_v = v;
          best_step = s;
          best_force = f;
        }
      }
    }
    if (!best_v) {
      Schedule s = make_schedule(g, cur.earliest, lat);
      FuUsage u = hlsched::fu_usage(g, s, lat);
      return {std::move(s), std::move(u)};
    }
    fixed[*best_v] = best_step;
  }
}

/// Force-directed list scheduling: ready ops are ranked by the force of
/// placing them in the current step, recomputed every step.
inline Schedule fdls(const Dfg& g, const LatencyModel& lat,
                     const ResourceConstraints& rc) {
  require_operational(g);
  return list_schedule_with(
      g, lat, rc,
      [&](int step, const std::vector<NodeId>& ready,
          const std::vector<int>& start) {
        std::vector<int> fixed = start;
        // Deadline: the earliest completion given what is already placed.
        TimeFrames probe = time_frames(g, lat, 1 << 20, fixed, step);
        int deadline = 0;
        for (NodeId v = 0; v < g.size(); ++v)
          deadline = std::max(deadline, probe.earliest[v] + lat(g.op(v)) - 1);
        TimeFrames cur = time_frames(g, lat, deadline, fixed, step);
        DistributionGraph dg = distribution_graph(g, lat, cur);
        // Forces are quantised so floating-point noise cannot reorder ties.
        std::vector<std::pair<long long, NodeId>> ranked;
        for (NodeId v : ready) {
          fixed[v] = step;
          TimeFrames next = time_frames(g, lat, deadline, fixed, step);
          fixed[v] = 0;
          double f = frame_change_force(g, lat, dg, cur, next);
          ranked.emplace_back(std::llround(f * 1e9), v);
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) {
                           return a.first < b.first;
                         });
        std::vector<NodeId> out;
        for (auto& [f, v] : ranked) out.push_back(v);
        return out;
      });
}

}  // namespace hlsched
