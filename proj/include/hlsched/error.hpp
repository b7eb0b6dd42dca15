// SPDX-License-Identifier: Apache-2.0
//
// Exception types thrown by the hlsched library.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hlsched {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CyclicGraph : public Error {
 public:
  CyclicGraph() : Error("graph contains a cycle") {}
};

class InfeasibleDeadline : public Error {
 public:
  InfeasibleDeadline(int deadline, int critical_path)
      : Error("deadline " + std::to_string(deadline) +
              " is shorter than the critical path (" +
              std::to_string(critical_path) + ")"),
        deadline_(deadline),
        critical_path_(critical_path) {}

  int deadline() const noexcept { return deadline_; }
  int critical_path() const noexcept { return critical_path_; }

 private:
  int deadline_;
  int critical_path_;
};

class NodeSetMismatch : public Error {
 public:
  NodeSetMismatch() : Error("schedules cover different node sets") {}
};

class NonAssociativeKind : public Error {
 public:
  explicit NonAssociativeKind(const std::string& kind)
      : Error("operation kind '" + kind + "' is not associative") {}
};

class MissingInput : public Error {
 public:
  explicit MissingInput(const std::string& name)
      : Error("primary input '" + name + "' is not bound"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Raised by schedulers and the evaluator on Call/Control/Storage nodes.
class UnschedulableNode : public Error {
 public:
  explicit UnschedulableNode(const std::string& name)
      : Error("node '" + name + "' is not an operational node"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "graph failed validation";
    for (const auto& s : v) out += "; " + s;
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace hlsched
