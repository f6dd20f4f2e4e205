#pragma once

#include <stdexcept>
#include <string>

namespace kdep {

// Base of every error the library throws. `kind()` is a stable tag used by
// the CLI to pick exit codes and by tests to match failure classes.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct TypeError : Error {
  explicit TypeError(const std::string& w) : Error("type", w) {}
};
struct SchemaError : Error {
  explicit SchemaError(const std::string& w) : Error("schema", w) {}
};
struct ArityError : Error {
  explicit ArityError(const std::string& w) : Error("arity", w) {}
};
struct CapabilityError : Error {
  explicit CapabilityError(const std::string& w) : Error("capability", w) {}
};
struct DegenerateInput : Error {
  explicit DegenerateInput(const std::string& w) : Error("degenerate", w) {}
};
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error("precondition", w) {}
};
struct ClassError : Error {
  explicit ClassError(const std::string& w) : Error("class", w) {}
};

// A bounded witness search gave up. Never means that the implication holds.
struct SearchExhausted : Error {
  explicit SearchExhausted(const std::string& w) : Error("bounds", w) {}
};

struct ParseError : Error {
  ParseError(const std::string& w, std::size_t pos)
      : Error("syntax", w + " at position " + std::to_string(pos)), pos(pos) {}
  std::size_t pos;
};

// Atom invariant violations carry the name of the broken rule, e.g.
// "repetition-free" or "equal-length".
struct InvariantError : Error {
  InvariantError(std::string rule_name, const std::string& w)
      : Error("invariant", w), rule(std::move(rule_name)) {}
  std::string rule;
};

}  // namespace kdep
