// SPDX-License-Identifier: Apache-2.0
//
// Built-in graphs. The JSON text comes from the committed files under
// fixtures/, embedded at configure time.

#pragma once

#include <optional>
#include <string_view>

#include "hlsched/fixtures.inc"
#include "hlsched/io.hpp"

namespace hlsched {

/// Fifth-order elliptic wave filter: 34 ops (26 add, 8 mul).
inline Dfg ewf_benchmark() { return parse_dfg(fixtures::kEwf); }

inline Dfg chain4_benchmark() { return parse_dfg(fixtures::kChain4); }

inline Dfg diamond_benchmark() { return parse_dfg(fixtures::kDiamond); }

inline std::optional<Dfg> builtin_graph(std::string_view name) {
  if (name == "ewf") return ewf_benchmark();
  if (name == "chain4") return chain4_benchmark();
  if (name == "diamond") return diamond_benchmark();
  return std::nullopt;
}

}  // namespace hlsched
