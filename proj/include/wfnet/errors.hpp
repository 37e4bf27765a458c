#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wfnet {

/// A single violated clause together with the nodes that witness it.
/// `clause` is a short identifier such as "gwf.1", "lgwf.3a" or "alpha.5c".
struct Violation {
  std::string clause;
  std::vector<std::string> nodes;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string describe(const Violation& v) {
  std::ostringstream os;
  os << v.clause;
  if (!v.detail.empty()) os << ": " << v.detail;
  if (!v.nodes.empty()) {
    os << " [";
    for (std::size_t i = 0; i < v.nodes.size(); ++i) os << (i ? "," : "") << v.nodes[i];
    os << "]";
  }
  return os.str();
}

inline std::string describe(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) {
    if (!out.empty()) out += "; ";
    out += describe(v);
  }
  return out;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NodeNotFound : public Error {
 public:
  explicit NodeNotFound(const std::string& name) : Error("node not found: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class NotEnabled : public Error {
 public:
  explicit NotEnabled(const std::string& transition)
      : Error("transition not enabled: " + transition) {}
};

class IncompleteExploration : public Error {
 public:
  using Error::Error;
};

class UnsafeNet : public Error {
 public:
  using Error::Error;
};

class MapMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidMorphism : public Error {
 public:
  using Error::Error;
};

class NotProperlyRefined : public Error {
 public:
  explicit NotProperlyRefined(const std::string& place)
      : Error("place is not properly refined: " + place) {}
};

class NotReachable : public Error {
 public:
  using Error::Error;
};

class SourceNotSound : public Error {
 public:
  using Error::Error;
};

class ComponentsNotDisjoint : public Error {
 public:
  ComponentsNotDisjoint(const std::string& what, std::vector<std::string> nodes)
      : Error(what), nodes_(std::move(nodes)) {}
  const std::vector<std::string>& nodes() const { return nodes_; }

 private:
  std::vector<std::string> nodes_;
};

class NonCommutingDiagram : public Error {
 public:
  explicit NonCommutingDiagram(const std::string& node)
      : Error("diagram does not commute at " + node), node_(node) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(const std::string& name) : Error("unknown node: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class NotTotal : public Error {
 public:
  explicit NotTotal(std::vector<std::string> unmapped)
      : Error("map is not total, unmapped: " + join(unmapped)), unmapped_(std::move(unmapped)) {}
  const std::vector<std::string>& unmapped() const { return unmapped_; }

 private:
  static std::string join(const std::vector<std::string>& xs) {
    std::string s;
    for (const auto& x : xs) s += (s.empty() ? "" : ",") + x;
    return s;
  }
  std::vector<std::string> unmapped_;
};

/// Base for errors that carry a list of violated definition clauses.
class ViolationError : public Error {
 public:
  ViolationError(const std::string& prefix, std::vector<Violation> violations)
      : Error(prefix + ": " + describe(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

  bool has_clause(const std::string& clause) const {
    for (const auto& v : violations_)
      if (v.clause == clause) return true;
    return false;
  }

 private:
  std::vector<Violation> violations_;
};

class StructuralViolation : public ViolationError {
 public:
  explicit StructuralViolation(std::vector<Violation> v)
      : ViolationError("structural violation", std::move(v)) {}
};

class LabelViolation : public ViolationError {
 public:
  explicit LabelViolation(std::vector<Violation> v)
      : ViolationError("label violation", std::move(v)) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wfnet
