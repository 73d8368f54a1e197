#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace greenpol {

// Syntax error from the expression parser. `offset` is a byte offset into
// the source text; `expected` names the token class the parser wanted.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t offset, std::string expected, const std::string& message)
      : std::runtime_error(message), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownIdentifierError : public ParseError {
public:
  UnknownIdentifierError(std::size_t offset, const std::string& name)
      : ParseError(offset, "identifier",
                   "unknown identifier '" + name + "' at offset " + std::to_string(offset)),
        name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

// Evaluation hit a point outside the domain of some subexpression
// (division by zero, log of a non-positive number, ...). `subexpr` is the
// printed form of the offending subtree.
class EvalDomainError : public std::runtime_error {
public:
  EvalDomainError(const std::string& what, std::string subexpr)
      : std::runtime_error(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}
  const std::string& subexpr() const { return subexpr_; }

private:
  std::string subexpr_;
};

class SingularMetricError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnsupportedSpacetimeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Adaptive integration could not meet its tolerance above the minimum
// step size.
class StepCollapseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Config loading failure; `pointer` is a JSON-pointer path into the
// offending document.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string pointer, const std::string& message)
      : std::runtime_error(pointer + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

private:
  std::string pointer_;
};

}  // namespace greenpol
