// SPDX-License-Identifier: Apache-2.0
//
// JSON reading and writing for graphs and for scheduling, allocation and
// partitioning results.
//
// Graph format:
//   {"inputs":["x1",...],
//    "nodes":[{"name":"n1","class":"operational","op":"add"},...],
//    "edges":[{"from":"x1","to":"n1","port":0},...],
//    "outputs":["n4",...]}
// Unknown top-level keys (e.g. "description") are ignored. Control steps in
// every result format are numbered from 1.

#pragma once

#include <map>
#include <string>
#include <string_view>

#include "json.hpp"

#include "hlsched/allocation.hpp"
#include "hlsched/partition.hpp"
#include "hlsched/saa.hpp"

namespace hlsched {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& field(const Json& obj, const char* key,
                         const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline std::string string_field(const Json& obj, const char* key,
                                const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string())
    throw ParseError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline const Json& array_field(const Json& obj, const char* key) {
  const Json& v = field(obj, key, "graph");
  if (!v.is_array()) throw ParseError(std::string(key) + ": expected an array");
  return v;
}

}  // namespace detail

/// Parses and validates a graph. Throws ParseError for malformed JSON or
/// wrongly typed fields and ValidationError for structural violations.
inline Dfg parse_dfg(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw ParseError("graph: expected a JSON object");

  Dfg g;
  std::vector<std::string> violations;
  const Json& inputs = detail::array_field(doc, "inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!inputs[i].is_string())
      throw ParseError("inputs[" + std::to_string(i) + "]: expected a string");
    g.add_input(inputs[i].get<std::string>());
  }

  const Json& nodes = detail::array_field(doc, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    std::string name = detail::string_field(nodes[i], "name", where);
    NodeClass cls = NodeClass::Operational;
    if (nodes[i].contains("class")) {
      auto c = parse_node_class(detail::string_field(nodes[i], "class", where));
      if (!c) throw ParseError(where + ".class: unknown node class");
      cls = *c;
    }
    std::optional<OpKind> op;
    if (nodes[i].contains("op")) {
      op = parse_op_kind(detail::string_field(nodes[i], "op", where));
      if (!op) throw ParseError(where + ".op: unknown operation");
    }
    g.add_node(std::move(name), cls, op);
  }

  auto resolve = [&](const std::string& name) -> std::optional<Source> {
    if (auto i = g.find_input(name)) return Source::input(*i);
    if (auto n = g.find_node(name)) return Source::node(*n);
    return std::nullopt;
  };

  const Json& edges = detail::array_field(doc, "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const std::string from = detail::string_field(edges[i], "from", where);
    const std::string to = detail::string_field(edges[i], "to", where);
    const Json& port = detail::field(edges[i], "port", where);
    if (!port.is_number_integer())
      throw ParseError(where + ".port: expected an integer");
    auto src = resolve(from);
    auto dst = g.find_node(to);
    if (!src) violations.push_back(where + ".from: unknown name '" + from + "'");
    if (!dst) violations.push_back(where + ".to: unknown node '" + to + "'");
    const auto p = port.get<long long>();
    if (p < 0 || p > 1'000'000) {
      violations.push_back(where + ".port: out of range");
      continue;
    }
    if (src && dst) g.add_edge(*src, *dst, static_cast<int>(p));
  }

  const Json& outputs = detail::array_field(doc, "outputs");
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const std::string where = "outputs[" + std::to_string(i) + "]";
    if (!outputs[i].is_string()) throw ParseError(where + ": expected a string");
    auto n = g.find_node(outputs[i].get<std::string>());
    if (!n) {
      violations.push_back(where + ": unknown node '" +
                           outputs[i].get<std::string>() + "'");
      continue;
    }
    g.add_output(*n);
  }

  for (auto& v : validate(g)) violations.push_back(std::move(v));
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return g;
}

inline Json dfg_to_json(const Dfg& g) {
  Json doc;
  doc["inputs"] = g.inputs();
  Json nodes = Json::array();
  for (const Node& nd : g.nodes()) {
    Json j;
    j["name"] = nd.name;
    j["class"] = std::string(to_string(nd.cls));
    if (nd.op) j["op"] = std::string(to_string(*nd.op));
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const Edge& e : g.edges())
    edges.push_back(
        {{"from", g.source_name(e.src)}, {"to", g.node(e.dst).name}, {"port", e.dst_port}});
  doc["edges"] = std::move(edges);
  Json outs = Json::array();
  for (NodeId o : g.outputs()) outs.push_back(g.node(o).name);
  doc["outputs"] = std::move(outs);
  return doc;
}

inline std::string serialize_dfg(const Dfg& g) { return dfg_to_json(g).dump(2); }

inline Json fu_usage_to_json(const FuUsage& u) {
  Json j = Json::object();
  for (auto [k, c] : u) j[std::string(to_string(k))] = c;
  return j;
}

inline Json schedule_to_json(const Dfg& g, const Schedule& s,
                             const LatencyModel& lat,
                             std::string_view algorithm) {
  Json j;
  j["algorithm"] = std::string(algorithm);
  j["length"] = s.length;
  Json start = Json::object();
  for (NodeId v = 0; v < g.size(); ++v) start[g.node(v).name] = s.start[v];
  j["start"] = std::move(start);
  j["fu_usage"] = fu_usage_to_json(fu_usage(g, s, lat));
  return j;
}

inline Json saa_to_json(const Dfg& original, const SaaResult& r,
                        const LatencyModel& lat) {
  Json j = schedule_to_json(r.graph, r.schedule, lat, "saa");
  j["baseline_length"] = r.baseline_length;
  Json chains = Json::array();
  for (const Chain& c : r.chains) {
    Json names = Json::array();
    for (NodeId v : c.nodes) names.push_back(original.node(v).name);
    chains.push_back(std::move(names));
  }
  Json cuts = Json::array();
  for (const Cut& c : r.cuts)
    cuts.push_back({{"from", original.node(c.from).name},
                    {"to", original.node(c.to).name}});
  Json moves = Json::array();
  for (const Move& m : r.moves)
    moves.push_back({{"node", r.graph.node(m.node).name},
                     {"from", m.from_step},
                     {"to", m.to_step}});
  j["transform"] = {{"applied", r.transform_applied},
                    {"chains", std::move(chains)},
                    {"cuts", std::move(cuts)},
                    {"moves", std::move(moves)}};
  j["graph"] = dfg_to_json(r.graph);
  return j;
}

inline Json allocation_to_json(const Dfg& g, const AllocationResult& a,
                               std::string_view algorithm) {
  Json j;
  j["algorithm"] = std::string(algorithm);
  j["fu_total"] = a.fu_total;
  j["fu"] = fu_usage_to_json(a.fu);
  j["registers"] = a.registers;
  j["registers_with_inputs"] = a.registers_with_inputs;
  j["clique_registers"] = a.clique_registers;
  Json regs = Json::object();
  for (std::size_t i = 0; i < a.lifetimes.size(); ++i)
    regs[g.source_name(a.lifetimes[i].value)] = a.registers_binding.reg[i];
  Json fus = Json::object();
  for (NodeId v = 0; v < g.size(); ++v) {
    const FuInstance& f = a.fu_binding.instance[v];
    fus[g.node(v).name] =
        std::string(to_string(f.kind)) + "#" + std::to_string(f.index);
  }
  j["bindings"] = {{"registers", std::move(regs)}, {"fu", std::move(fus)}};
  return j;
}

inline Json partition_to_json(const Dfg& g, const Partition& p,
                              const PartitionMetrics& m,
                              std::string_view strategy) {
  Json j;
  j["strategy"] = std::string(strategy);
  Json sides = Json::object();
  for (NodeId v = 0; v < g.size(); ++v)
    sides[g.node(v).name] = std::string(to_string(p[v]));
  j["sides"] = std::move(sides);
  j["edge_cut"] = m.edge_cut;
  j["buffer_peak"] = m.buffer_peak;
  j["buffer_total"] = m.buffer_total;
  j["delay"] = m.delay;
  j["comm_cost"] = m.comm_cost;
  return j;
}

}  // namespace hlsched
