#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "jacobi/number.hpp"

namespace jacobi {

class Chart;
class Point;

enum class NodeKind : std::uint8_t { Constant, Variable, Sum, Product, Quotient, Power, Negate, Call };
enum class Builtin : std::uint8_t { Exp, Ln, Sin, Cos };

std::string_view builtin_name(Builtin fn);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  Builtin fn = Builtin::Exp;  // Call only
  Number value;               // Constant only
  std::string name;           // Variable only
  NodePtr a;                  // left child / unary operand
  NodePtr b;                  // right child
};

/// Immutable symbolic expression over named coordinates.  Copies share nodes;
/// all rewriting returns fresh trees.
class Expression {
 public:
  Expression();  // literal 0

  static Expression constant(Number n);
  static Expression integer(std::int64_t v);
  static Expression rational(std::int64_t num, std::int64_t den);
  static Expression real(double v);
  static Expression variable(std::string name);

  // Structural constructors used by the parser; no folding of any kind.
  static Expression make_sum(Expression a, Expression b);
  static Expression make_product(Expression a, Expression b);
  static Expression make_quotient(Expression a, Expression b);
  static Expression make_power(Expression a, Expression b);
  static Expression make_negate(Expression a);
  static Expression make_call(Builtin fn, Expression a);

  NodeKind kind() const { return node_->kind; }
  const Number& number() const;
  const std::string& name() const;
  Builtin func() const;
  Expression left() const;
  Expression right() const;
  Expression operand() const { return left(); }

  bool is_zero() const;
  bool is_one() const;
  bool is_constant() const { return kind() == NodeKind::Constant; }

  bool same_node(const Expression& o) const { return node_ == o.node_; }
  bool operator==(const Expression& o) const;
  bool operator!=(const Expression& o) const { return !(*this == o); }

  /// Text in the expression grammar; parses back to an equal tree
  /// (equality after simplify for folded constants).
  std::string str() const;
  /// Truncated rendering for error messages.
  std::string str_truncated(std::size_t max_chars = 120) const;

  double evaluate(const Point& p) const;
  Expression derivative(std::string_view var) const;
  Expression simplified() const;

  void collect_variables(std::set<std::string>& out) const;
  /// Throws UnknownIdentifier when a free variable is not a chart coordinate.
  void validate_over(const Chart& chart) const;

  const Node* node() const { return node_.get(); }

 private:
  friend class Tape;  // wraps stored nodes for diagnostics
  explicit Expression(NodePtr n) : node_(std::move(n)) {}
  NodePtr node_;
};

// Arithmetic builders.  These fold literal identities (x+0, x*1, x*0, x^1,
// x^0, constant arithmetic) so machine-generated trees stay small; they never
// reorder or expand.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression pow(const Expression& base, const Expression& exponent);
Expression pow(const Expression& base, std::int64_t exponent);
Expression exp(const Expression& a);
Expression ln(const Expression& a);
Expression sin(const Expression& a);
Expression cos(const Expression& a);

/// Partial derivative with the variable checked against the chart.
Expression differentiate(const Expression& e, const Chart& chart, std::string_view var);
double evaluate(const Expression& e, const Point& p);
Expression simplify(const Expression& e);

}  // namespace jacobi
