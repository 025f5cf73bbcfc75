#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "pencert/errors.hpp"
#include "pencert/types.hpp"

namespace pencert {

enum class UnaryOp { Neg, Abs, Sqrt, Sin, Cos, Exp, Log };
enum class BinaryOp { Add, Sub, Mul, Div, Pow, Max, Min };

class ExprAst;
using ExprPtr = std::shared_ptr<const ExprAst>;

/// Immutable expression tree over variables x1..xn.
class ExprAst {
 public:
  struct Constant {
    double value;
  };
  struct Variable {
    int index;  // 1-based
  };
  struct Unary {
    UnaryOp op;
    ExprPtr child;
  };
  struct Binary {
    BinaryOp op;
    ExprPtr left;
    ExprPtr right;
  };
  using Node = std::variant<Constant, Variable, Unary, Binary>;

  explicit ExprAst(Node node) : node_(std::move(node)) {}
  const Node& node() const { return node_; }

 private:
  Node node_;
};

ExprPtr make_constant(double value);
ExprPtr make_variable(int index);
ExprPtr make_unary(UnaryOp op, ExprPtr child);
ExprPtr make_binary(BinaryOp op, ExprPtr left, ExprPtr right);

/// Parses `text` against the constraint grammar:
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-')? power
///   power  := atom ('^' power)?          -- '^' is right-associative
///   atom   := number | 'x'k | func '(' args ')' | '(' expr ')'
///
/// Unary functions: abs, sqrt, sin, cos, exp, log. Binary: max, min.
/// Variables are x1..x<dim>; there is no implicit multiplication.
///
/// Throws SyntaxError (with byte offset), UnknownIdentifier, or
/// VariableOutOfRange.
ExprPtr parse(std::string_view text, int dim);

/// Exact recursive evaluation in real arithmetic. Any step that leaves the
/// finite reals (sqrt/log of a negative, division by zero, non-real power,
/// overflow, NaN) throws DomainError.
double evaluate(const ExprAst& ast, const Vec& x);

/// Canonical fully parenthesized form; re-parsing it reproduces the tree.
std::string to_string(const ExprAst& ast);

bool equal(const ExprAst& a, const ExprAst& b);

}  // namespace pencert
