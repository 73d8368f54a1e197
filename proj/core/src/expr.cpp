#include "greenpol/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <optional>

namespace greenpol {

struct Expr::Node {
  Kind kind;
  double number = 0.0;
  int variable = 0;
  Func func = Func::Sin;
  std::vector<Expr> children;
  int var_span = 0;
};

namespace {

const char* func_name(Expr::Func f) {
  switch (f) {
    case Expr::Func::Sin: return "sin";
    case Expr::Func::Cos: return "cos";
    case Expr::Func::Exp: return "exp";
    case Expr::Func::Log: return "log";
    case Expr::Func::Sqrt: return "sqrt";
    case Expr::Func::Tanh: return "tanh";
  }
  return "?";
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

Expr::Expr() : Expr(number(0.0).node_) {}

Expr Expr::make(Kind k, std::vector<Expr> children, double num, int var, Func f) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->number = num;
  n->variable = var;
  n->func = f;
  int span = (k == Kind::Variable) ? var + 1 : 0;
  for (const auto& c : children) span = std::max(span, c.variable_span());
  n->children = std::move(children);
  n->var_span = span;
  return Expr(std::move(n));
}

Expr Expr::number(double value) { return make(Kind::Number, {}, value); }
Expr Expr::variable(int index) { return make(Kind::Variable, {}, 0.0, index); }

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::number_value() const { return node_->number; }
int Expr::variable_index() const { return node_->variable; }
Expr::Func Expr::func() const { return node_->func; }
const Expr& Expr::child(int i) const { return node_->children[static_cast<std::size_t>(i)]; }
int Expr::child_count() const { return static_cast<int>(node_->children.size()); }
bool Expr::is_number(double v) const { return is_number() && number_value() == v; }
int Expr::variable_span() const { return node_->var_span; }

namespace {

// Folds a node whose children are all literals, keeping the node when
// evaluation fails so the domain error surfaces at eval time instead.
std::optional<double> try_fold(const Expr& e) {
  try {
    double v = eval(e, std::span<const double>{});
    if (std::isfinite(v)) return v;
  } catch (const EvalDomainError&) {
  }
  return std::nullopt;
}

bool all_literal(const Expr& e) {
  for (int i = 0; i < e.child_count(); ++i)
    if (!e.child(i).is_number()) return false;
  return true;
}

Expr fold_or(Expr e) {
  if (all_literal(e)) {
    if (auto v = try_fold(e)) return Expr::number(*v);
  }
  return e;
}

Expr make_binary(Expr::Kind k, const Expr& a, const Expr& b);

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_number(0.0)) return b;
  if (b.is_number(0.0)) return a;
  return make_binary(Expr::Kind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return -b;
  return make_binary(Expr::Kind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_number(0.0) || b.is_number(0.0)) return Expr::number(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  return make_binary(Expr::Kind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_number(1.0)) return a;
  return make_binary(Expr::Kind::Div, a, b);
}

Expr Expr::operator-() const {
  if (is_number()) return number(-number_value());
  if (kind() == Kind::Neg) return child(0);
  return make(Kind::Neg, {*this});
}

Expr Expr::binary(Kind k, const Expr& a, const Expr& b) {
  return fold_or(Expr::make(k, {a, b}));
}

Expr Expr::negate(const Expr& a) {
  if (a.is_number()) return number(-a.number_value());
  return make(Kind::Neg, {a});
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_number(1.0)) return base;
  if (exponent.is_number(0.0)) return Expr::number(1.0);
  return fold_or(Expr::make(Expr::Kind::Pow, {base, exponent}));
}

Expr pow(const Expr& base, double exponent) { return pow(base, Expr::number(exponent)); }

Expr Expr::call(Func f, Expr argument) {
  return fold_or(make(Kind::Call, {std::move(argument)}, 0.0, 0, f));
}

Expr sin(const Expr& e) { return Expr::call(Expr::Func::Sin, e); }
Expr cos(const Expr& e) { return Expr::call(Expr::Func::Cos, e); }
Expr exp(const Expr& e) { return Expr::call(Expr::Func::Exp, e); }
Expr log(const Expr& e) { return Expr::call(Expr::Func::Log, e); }
Expr sqrt(const Expr& e) { return Expr::call(Expr::Func::Sqrt, e); }
Expr tanh(const Expr& e) { return Expr::call(Expr::Func::Tanh, e); }

namespace {

Expr make_binary(Expr::Kind k, const Expr& a, const Expr& b) {
  return fold_or(Expr::make(k, {a, b}));
}

}  // namespace

// ---------------------------------------------------------------------------
// evaluation

namespace {

[[noreturn]] void domain_error(const char* what, const Expr& e) {
  throw EvalDomainError(what, to_string(e));
}

}  // namespace

double eval(const Expr& e, std::span<const double> x) {
  switch (e.kind()) {
    case Expr::Kind::Number:
      return e.number_value();
    case Expr::Kind::Variable: {
      int i = e.variable_index();
      if (i < 0 || static_cast<std::size_t>(i) >= x.size())
        domain_error("coordinate index out of range", e);
      return x[static_cast<std::size_t>(i)];
    }
    case Expr::Kind::Add:
      return eval(e.child(0), x) + eval(e.child(1), x);
    case Expr::Kind::Sub:
      return eval(e.child(0), x) - eval(e.child(1), x);
    case Expr::Kind::Mul:
      return eval(e.child(0), x) * eval(e.child(1), x);
    case Expr::Kind::Div: {
      double num = eval(e.child(0), x);
      double den = eval(e.child(1), x);
      if (den == 0.0) domain_error("division by zero", e);
      return num / den;
    }
    case Expr::Kind::Pow: {
      double base = eval(e.child(0), x);
      double expo = eval(e.child(1), x);
      if (base == 0.0 && expo < 0.0) domain_error("division by zero", e);
      if (base < 0.0 && !is_integer(expo))
        domain_error("fractional power of a negative base", e);
      double v = std::pow(base, expo);
      if (!std::isfinite(v)) domain_error("non-finite result", e);
      return v;
    }
    case Expr::Kind::Neg:
      return -eval(e.child(0), x);
    case Expr::Kind::Call: {
      double a = eval(e.child(0), x);
      double v = 0.0;
      switch (e.func()) {
        case Expr::Func::Sin: v = std::sin(a); break;
        case Expr::Func::Cos: v = std::cos(a); break;
        case Expr::Func::Exp: v = std::exp(a); break;
        case Expr::Func::Log:
          if (a <= 0.0) domain_error("log of a non-positive number", e);
          v = std::log(a);
          break;
        case Expr::Func::Sqrt:
          if (a < 0.0) domain_error("sqrt of a negative number", e);
          v = std::sqrt(a);
          break;
        case Expr::Func::Tanh: v = std::tanh(a); break;
      }
      if (!std::isfinite(v)) domain_error("non-finite result", e);
      return v;
    }
  }
  domain_error("malformed expression", e);
}

// ---------------------------------------------------------------------------
// differentiation

Expr diff(const Expr& e, int index) {
  switch (e.kind()) {
    case Expr::Kind::Number:
      return Expr::number(0.0);
    case Expr::Kind::Variable:
      return Expr::number(e.variable_index() == index ? 1.0 : 0.0);
    case Expr::Kind::Add:
      return diff(e.child(0), index) + diff(e.child(1), index);
    case Expr::Kind::Sub:
      return diff(e.child(0), index) - diff(e.child(1), index);
    case Expr::Kind::Mul: {
      const Expr& u = e.child(0);
      const Expr& v = e.child(1);
      return diff(u, index) * v + u * diff(v, index);
    }
    case Expr::Kind::Div: {
      const Expr& u = e.child(0);
      const Expr& v = e.child(1);
      return (diff(u, index) * v - u * diff(v, index)) / (v * v);
    }
    case Expr::Kind::Pow: {
      const Expr& u = e.child(0);
      const Expr& v = e.child(1);
      if (v.is_number()) {
        double c = v.number_value();
        return Expr::number(c) * pow(u, c - 1.0) * diff(u, index);
      }
      // u^v = exp(v log u)
      return pow(u, v) * (diff(v, index) * log(u) + v * diff(u, index) / u);
    }
    case Expr::Kind::Neg:
      return -diff(e.child(0), index);
    case Expr::Kind::Call: {
      const Expr& u = e.child(0);
      Expr du = diff(u, index);
      switch (e.func()) {
        case Expr::Func::Sin: return cos(u) * du;
        case Expr::Func::Cos: return -(sin(u) * du);
        case Expr::Func::Exp: return exp(u) * du;
        case Expr::Func::Log: return du / u;
        case Expr::Func::Sqrt: return du / (Expr::number(2.0) * sqrt(u));
        case Expr::Func::Tanh:
          return (Expr::number(1.0) - tanh(u) * tanh(u)) * du;
      }
      break;
    }
  }
  return Expr::number(0.0);
}

// ---------------------------------------------------------------------------
// printing

namespace {

// Precedence levels for printing: additive 1, multiplicative 2, unary 3,
// power 4, atoms 5.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const Expr& e, std::string& out, int parent_prec) {
  int prec = precedence(e);
  bool need_paren = prec < parent_prec;
  if (e.is_number() && e.number_value() < 0.0) need_paren = parent_prec > 1;
  if (need_paren) out += '(';
  switch (e.kind()) {
    case Expr::Kind::Number:
      out += format_number(e.number_value());
      break;
    case Expr::Kind::Variable:
      out += 'x';
      out += std::to_string(e.variable_index());
      break;
    case Expr::Kind::Add:
      print(e.child(0), out, 1);
      out += " + ";
      print(e.child(1), out, 2);
      break;
    case Expr::Kind::Sub:
      print(e.child(0), out, 1);
      out += " - ";
      print(e.child(1), out, 2);
      break;
    case Expr::Kind::Mul:
      print(e.child(0), out, 2);
      out += "*";
      print(e.child(1), out, 3);
      break;
    case Expr::Kind::Div:
      print(e.child(0), out, 2);
      out += "/";
      print(e.child(1), out, 3);
      break;
    case Expr::Kind::Neg:
      out += '-';
      print(e.child(0), out, 3);
      break;
    case Expr::Kind::Pow:
      print(e.child(0), out, 5);
      out += '^';
      print(e.child(1), out, 3);
      break;
    case Expr::Kind::Call:
      out += func_name(e.func());
      out += '(';
      print(e.child(0), out, 0);
      out += ')';
      break;
  }
  if (need_paren) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out, 0);
  return out;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, "end of input",
                       "syntax error at offset " + std::to_string(pos_) +
                           ": expected end of input");
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool consume(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& expected) {
    skip_ws();
    throw ParseError(pos_, expected,
                     "syntax error at offset " + std::to_string(pos_) + ": expected " + expected);
  }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      if (consume('+'))
        e = Expr::binary(Expr::Kind::Add, e, parse_product());
      else if (consume('-'))
        e = Expr::binary(Expr::Kind::Sub, e, parse_product());
      else
        return e;
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    for (;;) {
      if (consume('*'))
        e = Expr::binary(Expr::Kind::Mul, e, parse_unary());
      else if (consume('/'))
        e = Expr::binary(Expr::Kind::Div, e, parse_unary());
      else
        return e;
    }
  }

  Expr parse_unary() {
    if (consume('-')) return Expr::negate(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (consume('^')) return Expr::binary(Expr::Kind::Pow, base, parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("a number, variable, function or '('");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!consume(')')) fail("')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("a number, variable, function or '('");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to a following token, not this literal
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    return Expr::number(std::strtod(text.c_str(), nullptr));
  }

  Expr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      try {
        return Expr::variable(std::stoi(name.substr(1)));
      } catch (const std::out_of_range&) {
        throw ParseError(start, "variable index",
                         "syntax error at offset " + std::to_string(start) +
                             ": variable index out of range");
      }
    }
    static const std::pair<const char*, Expr::Func> funcs[] = {
        {"sin", Expr::Func::Sin}, {"cos", Expr::Func::Cos},   {"exp", Expr::Func::Exp},
        {"log", Expr::Func::Log}, {"sqrt", Expr::Func::Sqrt}, {"tanh", Expr::Func::Tanh}};
    for (const auto& [fname, f] : funcs) {
      if (name == fname) {
        if (!consume('(')) fail("'(' after function name");
        Expr arg = parse_sum();
        if (!consume(')')) fail("')'");
        return Expr::call(f, arg);
      }
    }
    throw UnknownIdentifierError(start, name);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src) { return Parser(src).parse(); }

}  // namespace greenpol
