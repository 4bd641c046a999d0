#pragma once

// Small arithmetic expression language used to describe fields and maps in
// input files: literals, the variables u v t x s, + - * / ^, unary minus, and
// sin cos exp abs sqrt tanh.
//
//   expr  := term (("+" | "-") term)*
//   term  := unary (("*" | "/") unary)*
//   unary := "-" unary | power
//   power := atom ("^" unary)?          (right-associative)
//   atom  := number | var | func "(" expr ")" | "(" expr ")"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "causal2d/errors.hpp"

namespace causal2d::expr {

enum class Var { u, v, t, x, s };
enum class Func { sin, cos, exp, abs, sqrt, tanh };
enum class BinOp { add, sub, mul, div, pow };

inline constexpr std::array<std::string_view, 5> kVarNames = {"u", "v", "t", "x", "s"};
inline constexpr std::array<std::string_view, 6> kFuncNames = {"sin", "cos", "exp", "abs", "sqrt", "tanh"};

class Expr;

namespace node {
struct Number {
  double value;
};
struct Variable {
  Var var;
};
struct Negate {
  std::shared_ptr<const Expr> operand;
};
struct Binary {
  BinOp op;
  std::shared_ptr<const Expr> lhs, rhs;
};
struct Call {
  Func func;
  std::shared_ptr<const Expr> arg;
};
}  // namespace node

/// Variable values; unset entries are unbound.
struct Bindings {
  std::array<std::optional<double>, 5> values{};

  Bindings& set(Var var, double value) {
    values[static_cast<std::size_t>(var)] = value;
    return *this;
  }
  static Bindings uv(double u, double v) { return Bindings{}.set(Var::u, u).set(Var::v, v); }
  /// Every variable bound to the same value: lets one-variable expressions be
  /// written in whichever letter reads best.
  static Bindings all(double value) {
    Bindings b;
    for (auto& x : b.values) x = value;
    return b;
  }
};

/// Immutable AST node.
class Expr {
 public:
  using Node = std::variant<node::Number, node::Variable, node::Negate, node::Binary, node::Call>;

  explicit Expr(Node n) : node_(std::move(n)) {}
  const Node& node() const noexcept { return node_; }

  double eval(const Bindings& b) const {
    const double r = std::visit([&](const auto& n) { return eval_node(n, b); }, node_);
    if (!std::isfinite(r)) throw EvalError("expression evaluates to a non-finite value");
    return r;
  }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_.index() != b.node_.index()) return false;
    return std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          const T& y = std::get<T>(b.node_);
          if constexpr (std::is_same_v<T, node::Number>) return x.value == y.value;
          else if constexpr (std::is_same_v<T, node::Variable>) return x.var == y.var;
          else if constexpr (std::is_same_v<T, node::Negate>) return *x.operand == *y.operand;
          else if constexpr (std::is_same_v<T, node::Binary>) return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
          else return x.func == y.func && *x.arg == *y.arg;
        },
        a.node_);
  }

  /// Fully parenthesized text that parses back to an equal tree.
  std::string print() const {
    return std::visit(
        [](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, node::Number>) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            return buf;
          } else if constexpr (std::is_same_v<T, node::Variable>) {
            return std::string(kVarNames[static_cast<std::size_t>(n.var)]);
          } else if constexpr (std::is_same_v<T, node::Negate>) {
            return "(-" + n.operand->print() + ")";
          } else if constexpr (std::is_same_v<T, node::Binary>) {
            static constexpr std::array<const char*, 5> ops = {" + ", " - ", " * ", " / ", "^"};
            return "(" + n.lhs->print() + ops[static_cast<std::size_t>(n.op)] + n.rhs->print() + ")";
          } else {
            return std::string(kFuncNames[static_cast<std::size_t>(n.func)]) + "(" + n.arg->print() + ")";
          }
        },
        node_);
  }

 private:
  static double eval_node(const node::Number& n, const Bindings&) { return n.value; }
  static double eval_node(const node::Variable& n, const Bindings& b) {
    const auto& val = b.values[static_cast<std::size_t>(n.var)];
    if (!val) throw EvalError("unbound variable '" + std::string(kVarNames[static_cast<std::size_t>(n.var)]) + "'");
    return *val;
  }
  static double eval_node(const node::Negate& n, const Bindings& b) { return -n.operand->eval(b); }
  static double eval_node(const node::Binary& n, const Bindings& b) {
    const double l = n.lhs->eval(b), r = n.rhs->eval(b);
    switch (n.op) {
      case BinOp::add: return l + r;
      case BinOp::sub: return l - r;
      case BinOp::mul: return l * r;
      case BinOp::div:
        if (r == 0) throw EvalError("division by zero");
        return l / r;
      case BinOp::pow: return std::pow(l, r);
    }
    return 0;
  }
  static double eval_node(const node::Call& n, const Bindings& b) {
    const double a = n.arg->eval(b);
    switch (n.func) {
      case Func::sin: return std::sin(a);
      case Func::cos: return std::cos(a);
      case Func::exp: return std::exp(a);
      case Func::abs: return std::abs(a);
      case Func::sqrt:
        if (a < 0) throw EvalError("sqrt of a negative number");
        return std::sqrt(a);
      case Func::tanh: return std::tanh(a);
    }
    return 0;
  }

  Node node_;
};

using ExprPtr = std::shared_ptr<const Expr>;

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
    return e;
  }

 private:
  static ExprPtr make(Expr::Node n) { return std::make_shared<const Expr>(std::move(n)); }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = make(node::Binary{BinOp::add, lhs, parse_term()});
      else if (accept('-')) lhs = make(node::Binary{BinOp::sub, lhs, parse_term()});
      else return lhs;
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = make(node::Binary{BinOp::mul, lhs, parse_unary()});
      else if (accept('/')) lhs = make(node::Binary{BinOp::div, lhs, parse_unary()});
      else return lhs;
    }
  }

  ExprPtr parse_unary() {
    if (accept('-')) return make(node::Negate{parse_unary()});
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (accept('^')) return make(node::Binary{BinOp::pow, base, parse_unary()});
    return base;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr inner = parse_expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') digits();
      else pos_ = save;  // not an exponent; leave 'e' for the caller to reject
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("malformed number", start);
    return make(node::Number{value});
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    for (std::size_t k = 0; k < kFuncNames.size(); ++k) {
      if (name != kFuncNames[k]) continue;
      if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
      ExprPtr arg = parse_expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return make(node::Call{static_cast<Func>(k), arg});
    }
    for (std::size_t k = 0; k < kVarNames.size(); ++k)
      if (name == kVarNames[k]) return make(node::Variable{static_cast<Var>(k)});
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse(std::string_view source) { return detail::Parser(source).parse(); }

inline double eval(const Expr& e, const Bindings& b) { return e.eval(b); }

}  // namespace causal2d::expr
