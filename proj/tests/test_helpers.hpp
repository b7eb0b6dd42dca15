// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "hlsched/io.hpp"

namespace hlsched::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(HLSCHED_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Dfg load_fixture(const std::string& name) {
  return parse_dfg(read_file(fixture_path(name)));
}

inline NodeId id(const Dfg& g, const std::string& name) {
  return g.find_node(name).value();
}

/// Start steps keyed by node name.
inline std::map<std::string, int> by_name(const Dfg& g, const Schedule& s) {
  std::map<std::string, int> out;
  for (NodeId v = 0; v < g.size(); ++v) out[g.node(v).name] = s.start[v];
  return out;
}

}  // namespace hlsched::test
