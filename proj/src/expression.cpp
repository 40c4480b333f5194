#include "flrwc/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace flrwc::expr {

namespace {

NodePtr num(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Number;
  n->value = v;
  return n;
}

NodePtr unary(Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_num(const NodePtr& n, double v) {
  return n->op == Op::Number && n->value == v;
}

double apply_fn(Op op, double x) {
  switch (op) {
    case Op::Neg:   return -x;
    case Op::Log:   return std::log(x);
    case Op::Sqrt:  return std::sqrt(x);
    case Op::Exp:   return std::exp(x);
    case Op::Sin:   return std::sin(x);
    case Op::Cos:   return std::cos(x);
    case Op::Asinh: return std::asinh(x);
    default:        return x;
  }
}

// Constructors with light constant folding so derivative trees stay small.
// Only exact identities are used; domains are checked at evaluation time.
NodePtr mk_add(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  if (a->op == Op::Number && b->op == Op::Number) return num(a->value + b->value);
  return binary(Op::Add, std::move(a), std::move(b));
}

NodePtr mk_sub(NodePtr a, NodePtr b) {
  if (is_num(b, 0.0)) return a;
  if (a->op == Op::Number && b->op == Op::Number) return num(a->value - b->value);
  if (is_num(a, 0.0)) return unary(Op::Neg, std::move(b));
  return binary(Op::Sub, std::move(a), std::move(b));
}

NodePtr mk_mul(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (a->op == Op::Number && b->op == Op::Number) return num(a->value * b->value);
  return binary(Op::Mul, std::move(a), std::move(b));
}

NodePtr mk_div(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return num(0.0);
  if (is_num(b, 1.0)) return a;
  if (a->op == Op::Number && b->op == Op::Number && b->value != 0.0)
    return num(a->value / b->value);
  return binary(Op::Div, std::move(a), std::move(b));
}

NodePtr mk_pow(NodePtr a, NodePtr b) {
  if (is_num(b, 1.0)) return a;
  if (is_num(b, 0.0)) return num(1.0);
  return binary(Op::Pow, std::move(a), std::move(b));
}

NodePtr mk_neg(NodePtr a) {
  if (a->op == Op::Number) return num(-a->value);
  if (a->op == Op::Neg) return a->a;
  return unary(Op::Neg, std::move(a));
}

struct FnName {
  const char* name;
  Op op;
};

constexpr std::array<FnName, 6> kFunctions = {{
    {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"exp", Op::Exp},
    {"sin", Op::Sin}, {"cos", Op::Cos}, {"asinh", Op::Asinh},
}};

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      fail("end of input or an operator (+ - * / ^)");
    return e;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& expected) {
    char found[32];
    if (pos_ < src_.size())
      std::snprintf(found, sizeof found, "'%c'", src_[pos_]);
    else
      std::snprintf(found, sizeof found, "end of input");
    throw SyntaxError(pos_, expected,
                      "syntax error at offset " + std::to_string(pos_) +
                          ": expected " + expected + ", found " + found);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (eat('+'))
        e = binary(Op::Add, e, parse_term());
      else if (eat('-'))
        e = binary(Op::Sub, e, parse_term());
      else
        return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    for (;;) {
      if (eat('*'))
        e = binary(Op::Mul, e, parse_factor());
      else if (eat('/'))
        e = binary(Op::Div, e, parse_factor());
      else
        return e;
    }
  }

  // Unary minus binds looser than ^, so -t^2 is -(t^2).
  NodePtr parse_factor() {
    if (eat('-')) return unary(Op::Neg, parse_factor());
    return parse_power();
  }

  // Right-associative: the exponent recurses through factor.
  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (eat('^')) return binary(Op::Pow, base, parse_factor());
    return base;
  }

  NodePtr parse_atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!eat(')')) fail("')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("a number, 't', a function name, '(' or unary '-'");
  }

  NodePtr parse_number() {
    skip_ws();
    double v = 0;
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc()) fail("a number");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return num(v);
  }

  NodePtr parse_identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string id = src_.substr(start, pos_ - start);
    if (id == "t") return std::make_shared<Node>(Node{Op::Var, 0.0, nullptr, nullptr});
    for (const auto& fn : kFunctions) {
      if (id == fn.name) {
        if (!eat('(')) fail("'(' after function name");
        NodePtr arg = parse_expr();
        if (!eat(')')) fail("')'");
        return unary(fn.op, arg);
      }
    }
    throw UnknownIdentifier(start, id,
                            "unknown identifier '" + id + "' at offset " +
                                std::to_string(start) +
                                " (variable is 't'; functions: log sqrt exp sin cos asinh)");
  }
};

NodePtr diff(const NodePtr& n) {
  switch (n->op) {
    case Op::Number: return num(0.0);
    case Op::Var:    return num(1.0);
    case Op::Add:    return mk_add(diff(n->a), diff(n->b));
    case Op::Sub:    return mk_sub(diff(n->a), diff(n->b));
    case Op::Mul:    return mk_add(mk_mul(diff(n->a), n->b), mk_mul(n->a, diff(n->b)));
    case Op::Div:
      return mk_div(mk_sub(mk_mul(diff(n->a), n->b), mk_mul(n->a, diff(n->b))),
                    mk_pow(n->b, num(2.0)));
    case Op::Pow:
      // Constant exponent keeps the derivative valid for negative bases.
      if (n->b->op == Op::Number)
        return mk_mul(mk_mul(num(n->b->value), mk_pow(n->a, num(n->b->value - 1.0))),
                      diff(n->a));
      // General rule: (u^v)' = u^v (v' log u + v u'/u).
      return mk_mul(mk_pow(n->a, n->b),
                    mk_add(mk_mul(diff(n->b), unary(Op::Log, n->a)),
                           mk_div(mk_mul(n->b, diff(n->a)), n->a)));
    case Op::Neg:   return mk_neg(diff(n->a));
    case Op::Log:   return mk_div(diff(n->a), n->a);
    case Op::Sqrt:  return mk_div(diff(n->a), mk_mul(num(2.0), unary(Op::Sqrt, n->a)));
    case Op::Exp:   return mk_mul(unary(Op::Exp, n->a), diff(n->a));
    case Op::Sin:   return mk_mul(unary(Op::Cos, n->a), diff(n->a));
    case Op::Cos:   return mk_neg(mk_mul(unary(Op::Sin, n->a), diff(n->a)));
    case Op::Asinh:
      return mk_div(diff(n->a),
                    unary(Op::Sqrt, mk_add(num(1.0), mk_pow(n->a, num(2.0)))));
  }
  return nullptr;  // unreachable
}

double eval(const Node* n, double t) {
  switch (n->op) {
    case Op::Number: return n->value;
    case Op::Var:    return t;
    case Op::Add:    return eval(n->a.get(), t) + eval(n->b.get(), t);
    case Op::Sub:    return eval(n->a.get(), t) - eval(n->b.get(), t);
    case Op::Mul:    return eval(n->a.get(), t) * eval(n->b.get(), t);
    case Op::Div:    return eval(n->a.get(), t) / eval(n->b.get(), t);
    case Op::Pow:    return std::pow(eval(n->a.get(), t), eval(n->b.get(), t));
    default:         return apply_fn(n->op, eval(n->a.get(), t));
  }
}

void print(const Node* n, std::string& out) {
  char buf[40];
  switch (n->op) {
    case Op::Number:
      std::snprintf(buf, sizeof buf, "%.17g", n->value);
      out += buf;
      return;
    case Op::Var:
      out += 't';
      return;
    case Op::Neg:
      out += "(-";
      print(n->a.get(), out);
      out += ')';
      return;
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow: {
      const char* sym = n->op == Op::Add   ? " + "
                        : n->op == Op::Sub ? " - "
                        : n->op == Op::Mul ? " * "
                        : n->op == Op::Div ? " / "
                                           : "^";
      out += '(';
      print(n->a.get(), out);
      out += sym;
      print(n->b.get(), out);
      out += ')';
      return;
    }
    default: {
      for (const auto& fn : kFunctions)
        if (fn.op == n->op) {
          out += fn.name;
          break;
        }
      out += '(';
      print(n->a.get(), out);
      out += ')';
      return;
    }
  }
}

bool equal(const Node* x, const Node* y) {
  if (x == y) return true;
  if (x == nullptr || y == nullptr || x->op != y->op) return false;
  if (x->op == Op::Number) return x->value == y->value;
  if (x->a && !equal(x->a.get(), y->a.get())) return false;
  if (x->b && !equal(x->b.get(), y->b.get())) return false;
  return true;
}

}  // namespace

ExpressionTree parse(const std::string& src) {
  Parser p(src);
  return ExpressionTree(p.run());
}

ExpressionTree differentiate(const ExpressionTree& tree) {
  return ExpressionTree(diff(tree.root()));
}

double evaluate(const ExpressionTree& tree, double t) {
  double v = eval(tree.root().get(), t);
  if (!std::isfinite(v))
    throw DomainError("expression evaluated to a non-finite value at t = " +
                      std::to_string(t));
  return v;
}

std::string to_string(const ExpressionTree& tree) {
  std::string out;
  print(tree.root().get(), out);
  return out;
}

bool structurally_equal(const ExpressionTree& x, const ExpressionTree& y) {
  return equal(x.root().get(), y.root().get());
}

}  // namespace flrwc::expr
