// SPDX-License-Identifier: Apache-2.0
//
// Data-flow graph model: typed nodes, ported edges, primary inputs and
// outputs, plus validation, topological ordering, critical path and exact
// rational evaluation.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hlsched/error.hpp"

namespace hlsched {

using Rational = boost::multiprecision::cpp_rational;

using NodeId = std::size_t;
using InputId = std::size_t;

enum class OpKind : std::uint8_t { Add, Sub, Mul, Neg, Copy };

inline constexpr OpKind kAllOpKinds[] = {OpKind::Add, OpKind::Sub, OpKind::Mul,
                                         OpKind::Neg, OpKind::Copy};

enum class NodeClass : std::uint8_t { Operational, Call, Control, Storage };

constexpr bool is_associative(OpKind k) noexcept {
  return k == OpKind::Add || k == OpKind::Mul;
}

constexpr int arity(OpKind k) noexcept {
  switch (k) {
    case OpKind::Neg:
    case OpKind::Copy:
      return 1;
    default:
      return 2;
  }
}

constexpr std::string_view to_string(OpKind k) noexcept {
  switch (k) {
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Neg: return "neg";
    case OpKind::Copy: return "copy";
  }
  return "?";
}

constexpr std::string_view to_string(NodeClass c) noexcept {
  switch (c) {
    case NodeClass::Operational: return "operational";
    case NodeClass::Call: return "call";
    case NodeClass::Control: return "control";
    case NodeClass::Storage: return "storage";
  }
  return "?";
}

inline std::optional<OpKind> parse_op_kind(std::string_view s) {
  for (OpKind k : kAllOpKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::optional<NodeClass> parse_node_class(std::string_view s) {
  for (NodeClass c : {NodeClass::Operational, NodeClass::Call,
                      NodeClass::Control, NodeClass::Storage})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

struct Node {
  NodeId id = 0;
  std::string name;
  NodeClass cls = NodeClass::Operational;
  std::optional<OpKind> op;  // present iff cls == Operational

  bool operator==(const Node&) const = default;
};

/// Edge source: either a primary input or a node result.
struct Source {
  enum class Kind : std::uint8_t { Input, Node } kind = Kind::Node;
  std::size_t index = 0;

  static Source input(InputId i) { return {Kind::Input, i}; }
  static Source node(NodeId n) { return {Kind::Node, n}; }
  bool is_input() const noexcept { return kind == Kind::Input; }
  bool is_node() const noexcept { return kind == Kind::Node; }

  auto operator<=>(const Source&) const = default;
};

struct Edge {
  Source src;
  NodeId dst = 0;
  int dst_port = 0;

  bool operator==(const Edge&) const = default;
};

/// Per-kind cycle counts; unlisted kinds take one cycle.
class LatencyModel {
 public:
  LatencyModel() = default;
  LatencyModel(std::initializer_list<std::pair<const OpKind, int>> init) {
    for (auto [k, c] : init) set(k, c);
  }

  void set(OpKind k, int cycles) {
    if (cycles < 1) throw Error("latency must be at least 1 cycle");
    cycles_[k] = cycles;
  }

  int operator()(OpKind k) const {
    auto it = cycles_.find(k);
    return it == cycles_.end() ? 1 : it->second;
  }

  static LatencyModel unit() { return {}; }

 private:
  std::map<OpKind, int> cycles_;
};

/// A directed acyclic data-flow graph. Node ids are dense ordinals equal to
/// the node's position in nodes().
class Dfg {
 public:
  InputId add_input(std::string name) {
    inputs_.push_back(std::move(name));
    return inputs_.size() - 1;
  }

  NodeId add_node(std::string name, OpKind op) {
    return add_node(std::move(name), NodeClass::Operational, op);
  }

  NodeId add_node(std::string name, NodeClass cls,
                  std::optional<OpKind> op = std::nullopt) {
    NodeId id = nodes_.size();
    nodes_.push_back(Node{id, std::move(name), cls, op});
    return id;
  }

  void add_edge(Source src, NodeId dst, int port) {
    edges_.push_back(Edge{src, dst, port});
  }
  void add_edge(NodeId src, NodeId dst, int port) {
    add_edge(Source::node(src), dst, port);
  }

  void add_output(NodeId n) { outputs_.push_back(n); }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::string>& inputs() const noexcept { return inputs_; }
  const std::vector<NodeId>& outputs() const noexcept { return outputs_; }

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(NodeId n) const { return nodes_.at(n); }
  OpKind op(NodeId n) const {
    const Node& nd = nodes_.at(n);
    if (!nd.op) throw UnschedulableNode(nd.name);
    return *nd.op;
  }

  std::optional<NodeId> find_node(std::string_view name) const {
    for (const Node& n : nodes_)
      if (n.name == name) return n.id;
    return std::nullopt;
  }
  std::optional<InputId> find_input(std::string_view name) const {
    for (std::size_t i = 0; i < inputs_.size(); ++i)
      if (inputs_[i] == name) return i;
    return std::nullopt;
  }

  bool is_output(NodeId n) const {
    return std::find(outputs_.begin(), outputs_.end(), n) != outputs_.end();
  }

  /// Node-to-node predecessors of n, deduplicated, ascending.
  std::vector<NodeId> preds(NodeId n) const {
    std::vector<NodeId> out;
    for (const Edge& e : edges_)
      if (e.dst == n && e.src.is_node()) out.push_back(e.src.index);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Node-to-node successors of n, deduplicated, ascending.
  std::vector<NodeId> succs(NodeId n) const {
    std::vector<NodeId> out;
    for (const Edge& e : edges_)
      if (e.src.is_node() && e.src.index == n) out.push_back(e.dst);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Number of edges leaving node n (not deduplicated).
  std::size_t fanout(NodeId n) const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [n](const Edge& e) {
          return e.src.is_node() && e.src.index == n;
        }));
  }

  /// Source feeding (n, port), if any.
  std::optional<Source> operand(NodeId n, int port) const {
    for (const Edge& e : edges_)
      if (e.dst == n && e.dst_port == port) return e.src;
    return std::nullopt;
  }

  std::string source_name(const Source& s) const {
    return s.is_input() ? inputs_.at(s.index) : nodes_.at(s.index).name;
  }

  bool operator==(const Dfg&) const = default;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::string> inputs_;
  std::vector<NodeId> outputs_;
};

namespace detail {

// Kahn's algorithm with a min-heap on node id. Returns a partial order when
// the graph is cyclic.
inline std::vector<NodeId> kahn(const Dfg& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<NodeId>> succ(n);
  std::vector<std::size_t> indeg(n, 0);
  for (const Edge& e : g.edges()) {
    if (!e.src.is_node() || e.src.index >= n || e.dst >= n) continue;
    succ[e.src.index].push_back(e.dst);
    ++indeg[e.dst];
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (NodeId w : succ[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  return order;
}

}  // namespace detail

/// Every structural violation of the graph, or an empty list when it is
/// well formed.
inline std::vector<std::string> validate(const Dfg& g) {
  std::vector<std::string> out;
  const std::size_t n = g.size();

  std::set<std::string> names;
  for (const auto& in : g.inputs())
    if (!names.insert(in).second)
      out.push_back("duplicate name '" + in + "'");
  for (const Node& nd : g.nodes()) {
    if (!names.insert(nd.name).second)
      out.push_back("duplicate name '" + nd.name + "'");
    if (nd.cls == NodeClass::Operational && !nd.op)
      out.push_back("node '" + nd.name + "': operational node without op");
    if (nd.cls != NodeClass::Operational && nd.op)
      out.push_back("node '" + nd.name + "': op on non-operational node");
  }

  std::map<std::pair<NodeId, int>, int> fed;
  for (const Edge& e : g.edges()) {
    bool src_ok = e.src.is_input() ? e.src.index < g.inputs().size()
                                   : e.src.index < n;
    if (!src_ok) {
      out.push_back("dangling edge source");
      continue;
    }
    if (e.dst >= n) {
      out.push_back("dangling edge destination from '" + g.source_name(e.src) +
                    "'");
      continue;
    }
    if (e.src.is_node() && e.src.index == e.dst)
      out.push_back("cycle at '" + g.node(e.dst).name + "' (self-loop)");
    if (e.dst_port < 0) {
      out.push_back("node '" + g.node(e.dst).name + "': negative port");
      continue;
    }
    if (++fed[{e.dst, e.dst_port}] == 2)
      out.push_back("node '" + g.node(e.dst).name + "': duplicate port " +
                    std::to_string(e.dst_port));
  }

  for (const Node& nd : g.nodes()) {
    if (nd.cls != NodeClass::Operational || !nd.op) continue;
    const int ar = arity(*nd.op);
    for (int p = 0; p < ar; ++p)
      if (!fed.count({nd.id, p}))
        out.push_back("node '" + nd.name + "': unfed port " +
                      std::to_string(p));
    for (const auto& [key, cnt] : fed)
      if (key.first == nd.id && key.second >= ar)
        out.push_back("node '" + nd.name + "': port " +
                      std::to_string(key.second) + " exceeds arity");
  }

  for (NodeId o : g.outputs())
    if (o >= n) out.push_back("dangling primary output");

  bool has_self_loop = std::any_of(
      g.edges().begin(), g.edges().end(), [&](const Edge& e) {
        return e.src.is_node() && e.src.index == e.dst && e.dst < n;
      });
  if (!has_self_loop && detail::kahn(g).size() != n)
    out.push_back("cycle among nodes");

  // Reachability from primary inputs.
  std::vector<char> reach(n, 0);
  std::vector<NodeId> stack;
  for (const Edge& e : g.edges())
    if (e.src.is_input() && e.dst < n && !reach[e.dst]) {
      reach[e.dst] = 1;
      stack.push_back(e.dst);
    }
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (const Edge& e : g.edges())
      if (e.src.is_node() && e.src.index == v && e.dst < n && !reach[e.dst]) {
        reach[e.dst] = 1;
        stack.push_back(e.dst);
      }
  }
  for (NodeId v = 0; v < n; ++v)
    if (!reach[v])
      out.push_back("node '" + g.node(v).name +
                    "' unreachable from primary inputs");
  return out;
}

/// Throws ValidationError unless the graph is well formed.
inline void require_valid(const Dfg& g) {
  auto v = validate(g);
  if (!v.empty()) throw ValidationError(std::move(v));
}

/// Topological order, ties broken by ascending node id.
inline std::vector<NodeId> topo_order(const Dfg& g) {
  auto order = detail::kahn(g);
  if (order.size() != g.size()) throw CyclicGraph();
  return order;
}

/// Throws UnschedulableNode on the first non-operational node.
inline void require_operational(const Dfg& g) {
  for (const Node& nd : g.nodes())
    if (nd.cls != NodeClass::Operational || !nd.op)
      throw UnschedulableNode(nd.name);
}

/// Longest path where each node weighs its latency.
inline int critical_path_length(const Dfg& g, const LatencyModel& lat) {
  require_operational(g);
  std::vector<int> finish(g.size(), 0);
  int best = 0;
  for (NodeId v : topo_order(g)) {
    int start = 0;
    for (NodeId p : g.preds(v)) start = std::max(start, finish[p]);
    finish[v] = start + lat(g.op(v));
    best = std::max(best, finish[v]);
  }
  return best;
}

using InputBinding = std::map<std::string, Rational>;
using OutputValues = std::map<std::string, Rational>;

/// Exact evaluation of every node. Result indexed by node id.
inline std::vector<Rational> evaluate_nodes(const Dfg& g,
                                            const InputBinding& inputs) {
  require_operational(g);
  std::vector<Rational> in(g.inputs().size());
  for (std::size_t i = 0; i < g.inputs().size(); ++i) {
    auto it = inputs.find(g.inputs()[i]);
    if (it == inputs.end()) throw MissingInput(g.inputs()[i]);
    in[i] = it->second;
  }
  std::vector<Rational> val(g.size());
  auto fetch = [&](NodeId v, int port) -> const Rational& {
    auto s = g.operand(v, port);
    if (!s) throw ValidationError({"node '" + g.node(v).name + "': unfed port " +
                                   std::to_string(port)});
    return s->is_input() ? in[s->index] : val[s->index];
  };
  for (NodeId v : topo_order(g)) {
    switch (g.op(v)) {
      case OpKind::Add: val[v] = fetch(v, 0) + fetch(v, 1); break;
      case OpKind::Sub: val[v] = fetch(v, 0) - fetch(v, 1); break;
      case OpKind::Mul: val[v] = fetch(v, 0) * fetch(v, 1); break;
      case OpKind::Neg: val[v] = -fetch(v, 0); break;
      case OpKind::Copy: val[v] = fetch(v, 0); break;
    }
  }
  return val;
}

/// Values of the primary outputs, keyed by output node name.
inline OutputValues evaluate(const Dfg& g, const InputBinding& inputs) {
  auto val = evaluate_nodes(g, inputs);
  OutputValues out;
  for (NodeId o : g.outputs()) out[g.node(o).name] = val[o];
  return out;
}

}  // namespace hlsched
