// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end shared by the hlsched tool and its tests.
//
//   hlsched schedule|compare|allocate|partition --input <path|ewf> ...
//
// Exit codes: 0 success, 1 input error (usage, parse, validation,
// unschedulable node), 2 infeasible deadline.

#pragma once

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hlsched/benchmarks.hpp"
#include "hlsched/force_directed.hpp"

namespace hlsched::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kInfeasible = 2 };

inline const std::vector<std::string> kAlgorithms = {"asap", "alap", "mbs", "ls",
                                                     "fds",  "fdls", "saa"};

struct RunConfig {
  std::string input;
  std::string algorithm = "mbs";
  std::vector<std::string> algorithms = {"asap", "alap", "mbs", "saa"};
  int adders = 0;       // 0 = unlimited
  int multipliers = 0;  // 0 = unlimited
  std::string latency;
  int deadline = 0;  // 0 = critical path
  std::string format = "table";
  unsigned seed = 0;
  // partition
  std::string strategy = "cycles";
  long long threshold = 2;
  std::string sw_cycles;
  std::string hw_cycles;
  int transfer = 0;
};

/// Input errors raised while interpreting a RunConfig.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// "add=1,mul=2" -> {Add: 1, Mul: 2}.
inline std::map<OpKind, int> parse_kind_map(const std::string& text,
                                            int min_value) {
  std::map<OpKind, int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw UsageError("expected kind=value, got '" + item + "'");
    auto kind = parse_op_kind(item.substr(0, eq));
    if (!kind) throw UsageError("unknown operation kind in '" + item + "'");
    int value = 0;
    try {
      std::size_t used = 0;
      value = std::stoi(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number in '" + item + "'");
    }
    if (value < min_value)
      throw UsageError("value in '" + item + "' must be at least " +
                       std::to_string(min_value));
    out[*kind] = value;
  }
  return out;
}

inline Dfg load_graph(const std::string& input) {
  std::ifstream in(input, std::ios::binary);
  if (!in) {
    if (auto g = builtin_graph(input)) return *g;
    throw UsageError("cannot open input '" + input + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dfg(buf.str());
}

inline LatencyModel latency_model(const RunConfig& cfg) {
  LatencyModel lat;
  for (auto [k, c] : parse_kind_map(cfg.latency, 1)) lat.set(k, c);
  return lat;
}

inline ResourceConstraints resources(const RunConfig& cfg) {
  ResourceConstraints rc;
  if (cfg.adders > 0) rc.set(OpKind::Add, cfg.adders);
  if (cfg.multipliers > 0) rc.set(OpKind::Mul, cfg.multipliers);
  return rc;
}

/// As-late-as-possible under a resource budget: list-schedule the reversed
/// graph by ASAP priority and mirror the result.
inline Schedule reverse_list_schedule(const Dfg& g, const LatencyModel& lat,
                                      const ResourceConstraints& rc) {
  Dfg rev;
  for (const Node& nd : g.nodes()) rev.add_node(nd.name, nd.cls, nd.op);
  for (const Edge& e : g.edges())
    if (e.src.is_node()) rev.add_edge(e.dst, e.src.index, 0);
  Schedule r = list_schedule(rev, lat, rc, PriorityRule::by_asap(rev, lat));
  std::vector<int> start(g.size());
  for (NodeId v = 0; v < g.size(); ++v)
    start[v] = r.length - (r.start[v] + lat(g.op(v)) - 1) + 1;
  return make_schedule(g, std::move(start), lat);
}

/// Outcome of running one algorithm on a graph.
struct Run {
  std::string algorithm;
  Dfg graph;  // the scheduled graph (transformed for saa)
  Schedule schedule;
  std::optional<int> unconstrained_length;  // asap/alap rows of compare
  std::optional<SaaResult> saa;
  double runtime_ms = 0;
};

/// `constrained` selects the resource-aware reading of asap/alap used by the
/// comparison table; the schedule command uses the textbook definitions.
inline Run run_algorithm(const Dfg& g, const std::string& alg,
                         const LatencyModel& lat, const ResourceConstraints& rc,
                         int deadline, bool constrained) {
  const auto t0 = std::chrono::steady_clock::now();
  Run run{alg, g, {}, std::nullopt, std::nullopt, 0};
  if (alg == "asap") {
    Schedule free = asap(g, lat);
    run.schedule = constrained
                       ? list_schedule(g, lat, rc, PriorityRule::by_asap(g, lat))
                       : free;
    if (constrained) run.unconstrained_length = free.length;
  } else if (alg == "alap") {
    Schedule free = alap(g, lat, deadline > 0 ? std::optional(deadline)
                                              : std::nullopt);
    run.schedule = constrained ? reverse_list_schedule(g, lat, rc) : free;
    if (constrained) run.unconstrained_length = free.length;
  } else if (alg == "mbs") {
    run.schedule = mbs(g, lat, rc);
  } else if (alg == "ls") {
    run.schedule = list_schedule(g, lat, rc, PriorityRule::by_alap(g, lat));
  } else if (alg == "fds") {
    int d = deadline > 0 ? deadline : critical_path_length(g, lat);
    run.schedule = fds(g, lat, d).schedule;
  } else if (alg == "fdls") {
    run.schedule = fdls(g, lat, rc);
  } else if (alg == "saa") {
    run.saa = saa(g, lat, rc);
    run.graph = run.saa->graph;
    run.schedule = run.saa->schedule;
  } else {
    throw UsageError("unknown algorithm '" + alg + "'");
  }
  const auto t1 = std::chrono::steady_clock::now();
  run.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  // fds is time-constrained and ignores the FU budget.
  const ResourceConstraints& check_rc =
      (alg == "fds" || (!constrained && (alg == "asap" || alg == "alap")))
          ? ResourceConstraints{}
          : rc;
  auto problems = check_schedule(run.graph, run.schedule, lat, check_rc);
  if (!problems.empty())
    throw std::logic_error("invalid schedule from " + alg + ": " + problems[0]);
  return run;
}

inline std::string format_ms(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << ms;
  return os.str();
}

inline std::string usage_text(const FuUsage& u) {
  std::string s;
  for (auto [k, c] : u) {
    if (!s.empty()) s += ' ';
    s += std::string(to_string(k)) + ":" + std::to_string(c);
  }
  return s;
}

inline void print_schedule_table(std::ostream& out, const Run& run,
                                 const LatencyModel& lat) {
  const Dfg& g = run.graph;
  const Schedule& s = run.schedule;
  out << "algorithm: " << run.algorithm << "\n";
  out << std::left << std::setw(6) << "step" << std::setw(36) << "ops"
      << "fu occupancy\n";
  for (int t = 1; t <= s.length; ++t) {
    std::string ops;
    FuUsage busy;
    for (NodeId v = 0; v < g.size(); ++v) {
      const int l = lat(g.op(v));
      if (s.start[v] == t) ops += (ops.empty() ? "" : " ") + g.node(v).name;
      if (s.start[v] <= t && t < s.start[v] + l) ++busy[g.op(v)];
    }
    out << std::left << std::setw(6) << t << std::setw(36)
        << (ops.empty() ? "-" : ops) << usage_text(busy) << "\n";
  }
  out << "length: " << s.length << "\n";
  out << "fu_usage: " << usage_text(fu_usage(g, s, lat)) << "\n";
  if (run.saa) {
    out << "baseline_length: " << run.saa->baseline_length << "\n";
    out << "chains_rebalanced: " << run.saa->chains.size() << "\n";
  }
  out << "runtime_ms: " << format_ms(run.runtime_ms) << "\n";
}

inline int cmd_schedule(const RunConfig& cfg, std::ostream& out) {
  Dfg g = load_graph(cfg.input);
  LatencyModel lat = latency_model(cfg);
  Run run = run_algorithm(g, cfg.algorithm, lat, resources(cfg), cfg.deadline,
                          false);
  if (cfg.format == "json") {
    Json j = run.saa ? saa_to_json(g, *run.saa, lat)
                     : schedule_to_json(run.graph, run.schedule, lat,
                                        run.algorithm);
    j["runtime_ms"] = run.runtime_ms;
    out << j.dump(2) << "\n";
  } else {
    print_schedule_table(out, run, lat);
  }
  return kOk;
}

struct ComparisonRow {
  std::string algorithm;
  int adders = 0;
  int multipliers = 0;
  int control_steps = 0;
  int fu_total = 0;
  int registers = 0;
  std::optional<int> unconstrained_steps;
  double runtime_ms = 0;
};

inline std::vector<ComparisonRow> compare_rows(const RunConfig& cfg) {
  for (const auto& a : cfg.algorithms)
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), a) == kAlgorithms.end())
      throw UsageError("unknown algorithm '" + a + "'");
  Dfg g = load_graph(cfg.input);
  LatencyModel lat = latency_model(cfg);
  ResourceConstraints rc = resources(cfg);
  std::vector<ComparisonRow> rows;
  for (const auto& alg : cfg.algorithms) {
    Run run = run_algorithm(g, alg, lat, rc, cfg.deadline, true);
    FuUsage u = fu_usage(run.graph, run.schedule, lat);
    ComparisonRow row;
    row.algorithm = alg;
    row.adders = u.count(OpKind::Add) ? u[OpKind::Add] : 0;
    row.multipliers = u.count(OpKind::Mul) ? u[OpKind::Mul] : 0;
    row.control_steps = run.schedule.length;
    row.fu_total = fu_total(u);
    row.registers = left_edge(lifetimes(run.graph, run.schedule, lat)).register_count;
    row.unconstrained_steps = run.unconstrained_length;
    row.runtime_ms = run.runtime_ms;
    rows.push_back(row);
  }
  return rows;
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  auto rows = compare_rows(cfg);
  if (cfg.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json j;
      j["algorithm"] = r.algorithm;
      j["add"] = r.adders;
      j["mul"] = r.multipliers;
      j["control_steps"] = r.control_steps;
      j["fu_total"] = r.fu_total;
      j["registers"] = r.registers;
      j["unconstrained_steps"] =
          r.unconstrained_steps ? Json(*r.unconstrained_steps) : Json(nullptr);
      j["runtime_ms"] = r.runtime_ms;
      arr.push_back(std::move(j));
    }
    out << Json{{"rows", std::move(arr)}}.dump(2) << "\n";
    return kOk;
  }
  out << std::left << std::setw(11) << "algorithm" << std::right
      << std::setw(4) << "+" << std::setw(4) << "*" << std::setw(15)
      << "control_steps" << std::setw(10) << "fu_total" << std::setw(11)
      << "registers" << std::setw(15) << "unconstrained" << std::setw(12)
      << "runtime_ms" << "\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(11) << r.algorithm << std::right
        << std::setw(4) << r.adders << std::setw(4) << r.multipliers
        << std::setw(15) << r.control_steps << std::setw(10) << r.fu_total
        << std::setw(11) << r.registers << std::setw(15)
        << (r.unconstrained_steps ? std::to_string(*r.unconstrained_steps)
                                  : std::string("-"))
        << std::setw(12) << format_ms(r.runtime_ms) << "\n";
  }
  return kOk;
}

inline int cmd_allocate(const RunConfig& cfg, std::ostream& out) {
  Dfg g = load_graph(cfg.input);
  LatencyModel lat = latency_model(cfg);
  Run run = run_algorithm(g, cfg.algorithm, lat, resources(cfg), cfg.deadline,
                          false);
  AllocationResult a = allocation_report(run.graph, run.schedule, lat);
  if (cfg.format == "json") {
    Json j = allocation_to_json(run.graph, a, cfg.algorithm);
    j["control_steps"] = run.schedule.length;
    j["runtime_ms"] = run.runtime_ms;
    out << j.dump(2) << "\n";
    return kOk;
  }
  out << "algorithm: " << cfg.algorithm << "\n"
      << "control_steps: " << run.schedule.length << "\n"
      << "fu: " << usage_text(a.fu) << "\n"
      << "fu_total: " << a.fu_total << "\n"
      << "registers (left-edge, inputs excluded): " << a.registers << "\n"
      << "registers (left-edge, inputs included): " << a.registers_with_inputs
      << "\n"
      << "registers (clique partitioning): " << a.clique_registers << "\n"
      << std::left << std::setw(10) << "value" << std::setw(8) << "birth"
      << std::setw(8) << "death" << "register\n";
  for (std::size_t i = 0; i < a.lifetimes.size(); ++i) {
    const auto& lt = a.lifetimes[i];
    out << std::left << std::setw(10) << run.graph.source_name(lt.value)
        << std::setw(8) << lt.birth << std::setw(8) << lt.death << "r"
        << a.registers_binding.reg[i] << "\n";
  }
  out << std::left << std::setw(10) << "op" << "fu\n";
  for (NodeId v = 0; v < run.graph.size(); ++v) {
    const auto& f = a.fu_binding.instance[v];
    out << std::left << std::setw(10) << run.graph.node(v).name
        << to_string(f.kind) << "#" << f.index << "\n";
  }
  out << "runtime_ms: " << format_ms(run.runtime_ms) << "\n";
  return kOk;
}

inline int cmd_partition(const RunConfig& cfg, std::ostream& out) {
  Dfg g = load_graph(cfg.input);
  LatencyModel lat = latency_model(cfg);
  CostModel cost;
  cost.sw_cycles = parse_kind_map(cfg.sw_cycles, 0);
  cost.hw_cycles = parse_kind_map(cfg.hw_cycles, 0);
  cost.transfer_cycles = cfg.transfer;
  if (cfg.transfer < 0) throw UsageError("--transfer must be non-negative");
  Run run = run_algorithm(g, cfg.algorithm, lat, resources(cfg), cfg.deadline,
                          false);
  Partition p;
  if (cfg.strategy == "cycles")
    p = partition_by_cycles(run.graph, cost, cfg.threshold);
  else if (cfg.strategy == "clique")
    p = partition_by_clique(run.graph, run.schedule, lat);
  else
    throw UsageError("unknown strategy '" + cfg.strategy + "'");
  PartitionMetrics m = partition_metrics(run.graph, run.schedule, p, lat, cost);
  if (cfg.format == "json") {
    Json j = partition_to_json(run.graph, p, m, cfg.strategy);
    j["runtime_ms"] = run.runtime_ms;
    out << j.dump(2) << "\n";
    return kOk;
  }
  out << "strategy: " << cfg.strategy << "\n";
  for (NodeId v = 0; v < run.graph.size(); ++v)
    out << std::left << std::setw(10) << run.graph.node(v).name
        << to_string(p[v]) << "\n";
  out << "edge_cut: " << m.edge_cut << "\n"
      << "buffer_peak: " << m.buffer_peak << "\n"
      << "buffer_total: " << m.buffer_total << "\n"
      << "delay: " << m.delay << "\n"
      << "comm_cost: " << m.comm_cost << "\n"
      << "runtime_ms: " << format_ms(run.runtime_ms) << "\n";
  return kOk;
}

/// Entry point. args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"High-level synthesis scheduling and allocation", "hlsched"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "graph file or builtin (ewf, chain4, diamond)")
        ->required();
    sub->add_option("--add", cfg.adders, "adder budget")->check(CLI::PositiveNumber);
    sub->add_option("--mul", cfg.multipliers, "multiplier budget")
        ->check(CLI::PositiveNumber);
    sub->add_option("--latency", cfg.latency, "cycles per kind, e.g. add=1,mul=2");
    sub->add_option("--deadline", cfg.deadline, "deadline for alap/fds")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format)->check(CLI::IsMember({"table", "json"}));
    sub->add_option("--seed", cfg.seed, "random seed (unused by deterministic runs)");
  };
  auto alg_option = [&](CLI::App* sub) {
    sub->add_option("--alg", cfg.algorithm)->check(CLI::IsMember(kAlgorithms));
  };

  auto* schedule = app.add_subcommand("schedule", "schedule a graph");
  add_common(schedule);
  alg_option(schedule);
  auto* compare = app.add_subcommand("compare", "compare algorithms");
  add_common(compare);
  compare->add_option("--algs", cfg.algorithms)->delimiter(',');
  auto* allocate = app.add_subcommand("allocate", "bind registers and FUs");
  add_common(allocate);
  alg_option(allocate);
  auto* partition = app.add_subcommand("partition", "hardware/software split");
  add_common(partition);
  alg_option(partition);
  partition->add_option("--strategy", cfg.strategy)
      ->check(CLI::IsMember({"cycles", "clique"}));
  partition->add_option("--threshold", cfg.threshold);
  partition->add_option("--sw", cfg.sw_cycles, "software cycles, e.g. add=1,mul=4");
  partition->add_option("--hw", cfg.hw_cycles, "hardware cycles per kind");
  partition->add_option("--transfer", cfg.transfer, "cycles per crossing value");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*schedule) return cmd_schedule(cfg, out);
    if (*compare) return cmd_compare(cfg, out);
    if (*allocate) return cmd_allocate(cfg, out);
    return cmd_partition(cfg, out);
  } catch (const InfeasibleDeadline& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace hlsched::cli
