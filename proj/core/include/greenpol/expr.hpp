#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greenpol/errors.hpp"

namespace greenpol {

// Immutable scalar expression over coordinates x0, x1, ... Used for metric
// components, operator coefficients and everything derived from them by
// symbolic differentiation. Construction folds literal-only subtrees and
// the neutral-element identities (x+0, 1*x, x^1, ...); no further
// simplification is attempted.
//
// Expr values are shared, immutable trees: cheap to copy and safe to use
// from several threads at once.
class Expr {
public:
  enum class Kind { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
  enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh };

  struct Node;

  // Value-initialised Expr is the literal 0.
  Expr();

  static Expr number(double value);
  static Expr variable(int index);
  static Expr call(Func f, Expr argument);
  // Plain node constructor used by the parser: folds literal-only
  // children, keeps everything else verbatim (no identity rules).
  static Expr binary(Kind k, const Expr& a, const Expr& b);
  static Expr negate(const Expr& a);

  Kind kind() const;
  double number_value() const;   // requires kind()==Number
  int variable_index() const;    // requires kind()==Variable
  Func func() const;             // requires kind()==Call
  const Expr& child(int i) const;
  int child_count() const;

  bool is_number() const { return kind() == Kind::Number; }
  bool is_number(double v) const;
  // One past the largest variable index appearing in the tree (0 if none).
  int variable_span() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;

  // Raw node assembly; prefer the named factories and operators.
  static Expr make(Kind k, std::vector<Expr> children, double num = 0.0, int var = 0,
                   Func f = Func::Sin);

private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, double exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);
Expr tanh(const Expr& e);

// Parses the expression grammar: binary + - * / ^, unary -, calls of
// sin/cos/exp/log/sqrt/tanh, variables x0..xN, numeric literals.
// Precedence ^ > unary - > * / > + -, all left-associative except ^.
// Throws ParseError / UnknownIdentifierError with a byte offset.
Expr parse_expr(std::string_view src);

// Prints with minimal parentheses; parse_expr(to_string(e)) evaluates
// identically to e.
std::string to_string(const Expr& e);

// Recursive evaluation in double precision. Throws EvalDomainError for
// points outside the domain (division by zero, log <= 0, sqrt of a
// negative, fractional power of a negative base, non-finite results).
double eval(const Expr& e, std::span<const double> x);

// Symbolic partial derivative with respect to coordinate `index`.
// Total on well-formed trees.
Expr diff(const Expr& e, int index);

}  // namespace greenpol
