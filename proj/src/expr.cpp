#include "pencert/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>

namespace pencert {

ExprPtr make_constant(double value) {
  return std::make_shared<const ExprAst>(ExprAst::Constant{value});
}

ExprPtr make_variable(int index) {
  return std::make_shared<const ExprAst>(ExprAst::Variable{index});
}

ExprPtr make_unary(UnaryOp op, ExprPtr child) {
  return std::make_shared<const ExprAst>(ExprAst::Unary{op, std::move(child)});
}

ExprPtr make_binary(BinaryOp op, ExprPtr left, ExprPtr right) {
  return std::make_shared<const ExprAst>(ExprAst::Binary{op, std::move(left), std::move(right)});
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  ExprPtr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError("empty expression", pos_);
    ExprPtr e = expr();
    skip_ws();
    if (pos_ < text_.size()) throw SyntaxError("trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) throw SyntaxError(std::string("expected '") + c + "'", pos_);
  }

  ExprPtr expr() {
    ExprPtr left = term();
    for (;;) {
      if (consume('+'))
        left = make_binary(BinaryOp::Add, left, term());
      else if (consume('-'))
        left = make_binary(BinaryOp::Sub, left, term());
      else
        return left;
    }
  }

  ExprPtr term() {
    ExprPtr left = factor();
    for (;;) {
      if (consume('*'))
        left = make_binary(BinaryOp::Mul, left, factor());
      else if (consume('/'))
        left = make_binary(BinaryOp::Div, left, factor());
      else
        return left;
    }
  }

  ExprPtr factor() {
    if (consume('-')) return make_unary(UnaryOp::Neg, power());
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (consume('^')) return make_binary(BinaryOp::Pow, base, power());
    return base;
  }

  ExprPtr atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw SyntaxError("expected a number, variable, function, or '('", pos_);
  }

  ExprPtr number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to the next token, not this number
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw SyntaxError("malformed number", start);
    return make_constant(value);
  }

  ExprPtr identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])))) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x' && all_digits(name.substr(1))) {
      int index = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (index < 1 || index > dim_)
        throw VariableOutOfRange("variable x" + std::to_string(index) + " out of range 1.." +
                                     std::to_string(dim_),
                                 start);
      return make_variable(index);
    }

    if (auto op = unary_name(name)) {
      expect('(');
      ExprPtr child = expr();
      expect(')');
      return make_unary(*op, child);
    }
    if (auto op = binary_name(name)) {
      expect('(');
      ExprPtr left = expr();
      expect(',');
      ExprPtr right = expr();
      expect(')');
      return make_binary(*op, left, right);
    }
    throw UnknownIdentifier("unknown identifier '" + std::string(name) + "'", start);
  }

  static bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  }

  static std::optional<UnaryOp> unary_name(std::string_view name) {
    if (name == "abs") return UnaryOp::Abs;
    if (name == "sqrt") return UnaryOp::Sqrt;
    if (name == "sin") return UnaryOp::Sin;
    if (name == "cos") return UnaryOp::Cos;
    if (name == "exp") return UnaryOp::Exp;
    if (name == "log") return UnaryOp::Log;
    return std::nullopt;
  }

  static std::optional<BinaryOp> binary_name(std::string_view name) {
    if (name == "max") return BinaryOp::Max;
    if (name == "min") return BinaryOp::Min;
    return std::nullopt;
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

double check_finite(double v) {
  if (!std::isfinite(v)) throw DomainError("evaluation left the finite reals");
  return v;
}

}  // namespace

ExprPtr parse(std::string_view text, int dim) {
  if (dim < 1) throw Error("parse: dimension must be positive");
  return Parser(text, dim).run();
}

double evaluate(const ExprAst& ast, const Vec& x) {
  struct Eval {
    const Vec& x;

    double operator()(const ExprAst::Constant& c) const { return c.value; }

    double operator()(const ExprAst::Variable& v) const {
      if (v.index < 1 || v.index > x.size())
        throw Error("evaluate: variable index exceeds point dimension");
      return x[v.index - 1];
    }

    double operator()(const ExprAst::Unary& u) const {
      double c = visit(*u.child);
      switch (u.op) {
        case UnaryOp::Neg:
          return -c;
        case UnaryOp::Abs:
          return std::abs(c);
        case UnaryOp::Sqrt:
          if (c < 0.0) throw DomainError("sqrt of a negative number");
          return std::sqrt(c);
        case UnaryOp::Sin:
          return std::sin(c);
        case UnaryOp::Cos:
          return std::cos(c);
        case UnaryOp::Exp:
          return check_finite(std::exp(c));
        case UnaryOp::Log:
          if (c <= 0.0) throw DomainError("log of a non-positive number");
          return std::log(c);
      }
      throw Error("evaluate: bad unary op");
    }

    double operator()(const ExprAst::Binary& b) const {
      double l = visit(*b.left);
      double r = visit(*b.right);
      switch (b.op) {
        case BinaryOp::Add:
          return check_finite(l + r);
        case BinaryOp::Sub:
          return check_finite(l - r);
        case BinaryOp::Mul:
          return check_finite(l * r);
        case BinaryOp::Div:
          if (r == 0.0) throw DomainError("division by zero");
          return check_finite(l / r);
        case BinaryOp::Pow: {
          double v = std::pow(l, r);
          if (std::isnan(v)) throw DomainError("pow produced a non-real result");
          return check_finite(v);
        }
        case BinaryOp::Max:
          return std::max(l, r);
        case BinaryOp::Min:
          return std::min(l, r);
      }
      throw Error("evaluate: bad binary op");
    }

    double visit(const ExprAst& node) const { return std::visit(*this, node.node()); }
  };

  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) throw Error("evaluate: point has non-finite components");
  return check_finite(Eval{x}.visit(ast));
}

std::string to_string(const ExprAst& ast) {
  struct Print {
    std::string operator()(const ExprAst::Constant& c) const {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof(buf), c.value);
      return std::string(buf, res.ptr);
    }

    std::string operator()(const ExprAst::Variable& v) const {
      return "x" + std::to_string(v.index);
    }

    std::string operator()(const ExprAst::Unary& u) const {
      std::string child = visit(*u.child);
      switch (u.op) {
        case UnaryOp::Neg:
          return "(-" + child + ")";
        case UnaryOp::Abs:
          return "abs(" + child + ")";
        case UnaryOp::Sqrt:
          return "sqrt(" + child + ")";
        case UnaryOp::Sin:
          return "sin(" + child + ")";
        case UnaryOp::Cos:
          return "cos(" + child + ")";
        case UnaryOp::Exp:
          return "exp(" + child + ")";
        case UnaryOp::Log:
          return "log(" + child + ")";
      }
      return child;
    }

    std::string operator()(const ExprAst::Binary& b) const {
      std::string l = visit(*b.left);
      std::string r = visit(*b.right);
      switch (b.op) {
        case BinaryOp::Add:
          return "(" + l + "+" + r + ")";
        case BinaryOp::Sub:
          return "(" + l + "-" + r + ")";
        case BinaryOp::Mul:
          return "(" + l + "*" + r + ")";
        case BinaryOp::Div:
          return "(" + l + "/" + r + ")";
        case BinaryOp::Pow:
          return "(" + l + "^" + r + ")";
        case BinaryOp::Max:
          return "max(" + l + "," + r + ")";
        case BinaryOp::Min:
          return "min(" + l + "," + r + ")";
      }
      return l;
    }

    std::string visit(const ExprAst& node) const { return std::visit(*this, node.node()); }
  };
  return Print{}.visit(ast);
}

bool equal(const ExprAst& a, const ExprAst& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  if (const auto* ca = std::get_if<ExprAst::Constant>(&na))
    return ca->value == std::get<ExprAst::Constant>(nb).value;
  if (const auto* va = std::get_if<ExprAst::Variable>(&na))
    return va->index == std::get<ExprAst::Variable>(nb).index;
  if (const auto* ua = std::get_if<ExprAst::Unary>(&na)) {
    const auto& ub = std::get<ExprAst::Unary>(nb);
    return ua->op == ub.op && equal(*ua->child, *ub.child);
  }
  const auto& ba = std::get<ExprAst::Binary>(na);
  const auto& bb = std::get<ExprAst::Binary>(nb);
  return ba.op == bb.op && equal(*ba.left, *bb.left) && equal(*ba.right, *bb.right);
}

}  // namespace pencert
