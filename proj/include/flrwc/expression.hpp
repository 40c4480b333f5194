// Arithmetic expressions in one variable t: parser, symbolic derivative,
// evaluator, printer. Used for user-supplied scale factors a(t).
//
// Grammar (whitespace insignificant, ^ right-associative, precedence
// ^  >  unary -  >  * /  >  + -):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?
//   atom   := NUMBER | 't' | FUNC '(' expr ')' | '(' expr ')'
//   FUNC   := log | sqrt | exp | sin | cos | asinh

#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

namespace flrwc::expr {

struct SyntaxError : std::runtime_error {
  std::size_t offset;    // byte offset into the source string
  std::string expected;  // description of what would have been accepted
  SyntaxError(std::size_t off, std::string exp, const std::string& msg)
      : std::runtime_error(msg), offset(off), expected(std::move(exp)) {}
};

struct UnknownIdentifier : std::runtime_error {
  std::size_t offset;
  std::string name;
  UnknownIdentifier(std::size_t off, std::string id, const std::string& msg)
      : std::runtime_error(msg), offset(off), name(std::move(id)) {}
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Op {
  Number, Var,
  Add, Sub, Mul, Div, Pow,   // binary
  Neg,                       // unary
  Log, Sqrt, Exp, Sin, Cos, Asinh  // unary functions
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable tree node; subtrees are shared freely between expressions.
struct Node {
  Op op;
  double value = 0.0;  // payload for Op::Number
  NodePtr a, b;        // b empty for unary nodes
};

class ExpressionTree {
 public:
  ExpressionTree() = default;
  explicit ExpressionTree(NodePtr root) : root_(std::move(root)) {}
  const NodePtr& root() const { return root_; }
  bool empty() const { return root_ == nullptr; }

 private:
  NodePtr root_;
};

// Throws SyntaxError (offset + expected set) or UnknownIdentifier.
ExpressionTree parse(const std::string& src);

// d/dt of the tree; pure tree rewriting, no numeric differencing involved.
ExpressionTree differentiate(const ExpressionTree& tree);

// Throws DomainError when the result is not finite.
double evaluate(const ExpressionTree& tree, double t);

// Unambiguous fully parenthesized form; parse(to_string(T)) equals T.
std::string to_string(const ExpressionTree& tree);

bool structurally_equal(const ExpressionTree& x, const ExpressionTree& y);

}  // namespace flrwc::expr
