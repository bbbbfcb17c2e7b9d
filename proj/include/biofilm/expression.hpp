#pragma once

// Small arithmetic language for initial and boundary data:
//   numbers, pi, e, one variable, + - * / ^ (right associative), unary minus,
//   exp(), cos(), sin(), parentheses.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "biofilm/error.hpp"

namespace biofilm {

class Expression {
 public:
  static Expression parse(std::string_view text, std::string_view variable) {
    Parser p{text, variable, 0};
    Expression e;
    e.root_ = p.expression();
    p.skip_space();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    e.text_ = std::string(text);
    return e;
  }

  double operator()(double x) const { return eval(*root_, x); }
  const std::string& text() const noexcept { return text_; }

 private:
  enum class Op { constant, variable, add, sub, mul, div, pow, neg, exp, cos, sin };

  struct Node {
    Op op = Op::constant;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr make(Op op, NodePtr lhs = {}, NodePtr rhs = {}, double value = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->value = value;
    return n;
  }

  static double eval(const Node& n, double x) {
    switch (n.op) {
      case Op::constant: return n.value;
      case Op::variable: return x;
      case Op::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
      case Op::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
      case Op::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
      case Op::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
      case Op::pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
      case Op::neg: return -eval(*n.lhs, x);
      case Op::exp: return std::exp(eval(*n.lhs, x));
      case Op::cos: return std::cos(eval(*n.lhs, x));
      case Op::sin: return std::sin(eval(*n.lhs, x));
    }
    return 0.0;
  }

  struct Parser {
    std::string_view text;
    std::string_view variable;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw Error(ErrorCode::parse_error, "expression \"" + std::string(text) + "\" at column " +
                                              std::to_string(pos + 1) + ": " + what);
    }

    void skip_space() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool accept(char c) {
      skip_space();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr expression() {
      NodePtr lhs = term();
      for (;;) {
        if (accept('+')) {
          lhs = make(Op::add, lhs, term());
        } else if (accept('-')) {
          lhs = make(Op::sub, lhs, term());
        } else {
          return lhs;
        }
      }
    }

    NodePtr term() {
      NodePtr lhs = unary();
      for (;;) {
        if (accept('*')) {
          lhs = make(Op::mul, lhs, unary());
        } else if (accept('/')) {
          lhs = make(Op::div, lhs, unary());
        } else {
          return lhs;
        }
      }
    }

    NodePtr unary() {
      if (accept('-')) return make(Op::neg, unary());
      if (accept('+')) return unary();
      return power();
    }

    NodePtr power() {
      NodePtr base = primary();
      if (accept('^')) return make(Op::pow, base, unary());
      return base;
    }

    NodePtr primary() {
      skip_space();
      if (pos >= text.size()) fail("unexpected end of input");
      const char ch = text[pos];
      if (ch == '(') {
        ++pos;
        NodePtr inner = expression();
        if (!accept(')')) fail("expected ')'");
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        const std::string rest(text.substr(pos));
        char* end = nullptr;
        const double value = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) fail("malformed number");
        pos += static_cast<std::size_t>(end - rest.c_str());
        return make(Op::constant, {}, {}, value);
      }
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
          ++pos;
        }
        const std::string_view name = text.substr(start, pos - start);
        if (name == variable) return make(Op::variable);
        if (name == "pi") return make(Op::constant, {}, {}, std::numbers::pi);
        if (name == "e") return make(Op::constant, {}, {}, std::numbers::e);
        Op fn;
        if (name == "exp") {
          fn = Op::exp;
        } else if (name == "cos") {
          fn = Op::cos;
        } else if (name == "sin") {
          fn = Op::sin;
        } else {
          pos = start;
          fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = expression();
        if (!accept(')')) fail("expected ')'");
        return make(fn, arg);
      }
      fail("unexpected '" + std::string(1, ch) + "'");
    }
  };

  NodePtr root_;
  std::string text_;
};

}  // namespace biofilm
