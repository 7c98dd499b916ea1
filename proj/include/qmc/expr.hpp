#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace qmc {

// Restricted arithmetic expressions over the variables j and v, with
// + - * / ** (right associative), parentheses, and log/exp/sqrt.  Covers the
// option strings the construction scripts accept, e.g. "0.1 * j**-3 / log(j+1)".
class Expression {
 public:
  static Expression parse(std::string_view text) {
    Parser p{text, 0};
    Expression e;
    e.root_ = p.parse_sum();
    p.skip_ws();
    if (p.pos != text.size())
      throw std::runtime_error("expression: trailing input at '" +
                               std::string(text.substr(p.pos)) + "'");
    return e;
  }

  double eval(double j = 0.0, double v = 1.0) const {
    if (!root_) throw std::runtime_error("expression: empty");
    return eval_node(*root_, j, v);
  }

  // True when the expression references the smoothness variable v.
  bool uses_v() const { return root_ && uses_v_node(*root_); }

 private:
  enum class Op { kNum, kJ, kV, kAdd, kSub, kMul, kDiv, kPow, kNeg, kLog, kExp, kSqrt };
  struct Node {
    Op op;
    double value = 0.0;
    std::unique_ptr<Node> lhs, rhs;
  };
  using NodePtr = std::unique_ptr<Node>;

  struct Parser {
    std::string_view s;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool consume(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    bool peek_pow() {
      skip_ws();
      return pos + 1 < s.size() && s[pos] == '*' && s[pos + 1] == '*';
    }

    NodePtr parse_sum() {
      NodePtr lhs = parse_product();
      while (true) {
        skip_ws();
        if (consume('+'))
          lhs = make(Op::kAdd, std::move(lhs), parse_product());
        else if (consume('-'))
          lhs = make(Op::kSub, std::move(lhs), parse_product());
        else
          return lhs;
      }
    }
    NodePtr parse_product() {
      NodePtr lhs = parse_unary();
      while (true) {
        skip_ws();
        const bool star = pos < s.size() && s[pos] == '*';
        const bool dstar = star && pos + 1 < s.size() && s[pos + 1] == '*';
        if (star && !dstar) {
          ++pos;
          lhs = make(Op::kMul, std::move(lhs), parse_unary());
        } else if (!star && consume('/')) {
          lhs = make(Op::kDiv, std::move(lhs), parse_unary());
        } else {
          return lhs;
        }
      }
    }
    NodePtr parse_unary() {
      skip_ws();
      if (consume('-')) return make(Op::kNeg, parse_unary(), nullptr);
      if (consume('+')) return parse_unary();
      return parse_postfix();
    }
    NodePtr parse_postfix() {
      NodePtr base = parse_primary();
      if (peek_pow()) {
        pos += 2;
        base = make(Op::kPow, std::move(base), parse_unary());
      }
      return base;
    }
    NodePtr parse_primary() {
      skip_ws();
      if (pos >= s.size()) throw std::runtime_error("expression: unexpected end");
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        NodePtr e = parse_sum();
        if (!consume(')')) throw std::runtime_error("expression: missing ')'");
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
      throw std::runtime_error(std::string("expression: unexpected character '") + c + "'");
    }
    NodePtr parse_number() {
      const std::size_t start = pos;
      while (pos < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
      if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        std::size_t q = pos + 1;
        if (q < s.size() && (s[q] == '+' || s[q] == '-')) ++q;
        if (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) {
          pos = q;
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        }
      }
      NodePtr n = make(Op::kNum, nullptr, nullptr);
      n->value = std::stod(std::string(s.substr(start, pos - start)));
      return n;
    }
    NodePtr parse_ident() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                s[pos] == '_')) ++pos;
      const std::string_view name = s.substr(start, pos - start);
      if (name == "j") return make(Op::kJ, nullptr, nullptr);
      if (name == "v") return make(Op::kV, nullptr, nullptr);
      if (name == "pi") {
        NodePtr n = make(Op::kNum, nullptr, nullptr);
        n->value = std::numbers::pi;
        return n;
      }
      if (name == "e") {
        NodePtr n = make(Op::kNum, nullptr, nullptr);
        n->value = std::numbers::e;
        return n;
      }
      Op fn;
      if (name == "log") fn = Op::kLog;
      else if (name == "exp") fn = Op::kExp;
      else if (name == "sqrt") fn = Op::kSqrt;
      else throw std::runtime_error("expression: unknown name '" + std::string(name) + "'");
      if (!consume('(')) throw std::runtime_error("expression: expected '(' after function");
      NodePtr arg = parse_sum();
      if (!consume(')')) throw std::runtime_error("expression: missing ')'");
      return make(fn, std::move(arg), nullptr);
    }
    static NodePtr make(Op op, NodePtr l, NodePtr r) {
      NodePtr n = std::make_unique<Node>();
      n->op = op;
      n->lhs = std::move(l);
      n->rhs = std::move(r);
      return n;
    }
  };

  static double eval_node(const Node& n, double j, double v) {
    switch (n.op) {
      case Op::kNum: return n.value;
      case Op::kJ: return j;
      case Op::kV: return v;
      case Op::kAdd: return eval_node(*n.lhs, j, v) + eval_node(*n.rhs, j, v);
      case Op::kSub: return eval_node(*n.lhs, j, v) - eval_node(*n.rhs, j, v);
      case Op::kMul: return eval_node(*n.lhs, j, v) * eval_node(*n.rhs, j, v);
      case Op::kDiv: return eval_node(*n.lhs, j, v) / eval_node(*n.rhs, j, v);
      case Op::kPow: return std::pow(eval_node(*n.lhs, j, v), eval_node(*n.rhs, j, v));
      case Op::kNeg: return -eval_node(*n.lhs, j, v);
      case Op::kLog: return std::log(eval_node(*n.lhs, j, v));
      case Op::kExp: return std::exp(eval_node(*n.lhs, j, v));
      case Op::kSqrt: return std::sqrt(eval_node(*n.lhs, j, v));
    }
    throw std::logic_error("expression: bad node");
  }

  static bool uses_v_node(const Node& n) {
    if (n.op == Op::kV) return true;
    if (n.lhs && uses_v_node(*n.lhs)) return true;
    if (n.rhs && uses_v_node(*n.rhs)) return true;
    return false;
  }

  NodePtr root_;
};

}  // namespace qmc
