#include "jacobi/expression.hpp"

#include <cmath>
#include <unordered_map>

#include "jacobi/chart.hpp"
#include "jacobi/detail/eval_ops.hpp"
#include "jacobi/errors.hpp"

namespace jacobi {

namespace {

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

const NodePtr& zero_node() {
  static const NodePtr z = make_node({NodeKind::Constant, Builtin::Exp, Number::integer(0), "", nullptr, nullptr});
  return z;
}
const NodePtr& one_node() {
  static const NodePtr o = make_node({NodeKind::Constant, Builtin::Exp, Number::integer(1), "", nullptr, nullptr});
  return o;
}

}  // namespace

std::string_view builtin_name(Builtin fn) {
  switch (fn) {
    case Builtin::Exp: return "exp";
    case Builtin::Ln: return "ln";
    case Builtin::Sin: return "sin";
    case Builtin::Cos: return "cos";
  }
  return "?";
}

Expression::Expression() : node_(zero_node()) {}

Expression Expression::constant(Number n) {
  if (n.exact() && n.num() == 0 && n.den() == 1) return Expression(zero_node());
  if (n.exact() && n.num() == 1 && n.den() == 1) return Expression(one_node());
  return Expression(make_node({NodeKind::Constant, Builtin::Exp, n, "", nullptr, nullptr}));
}
Expression Expression::integer(std::int64_t v) { return constant(Number::integer(v)); }
Expression Expression::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("rational constant with zero denominator");
  return constant(Number::rational(num, den));
}
Expression Expression::real(double v) { return constant(Number::real(v)); }
Expression Expression::variable(std::string name) {
  return Expression(make_node({NodeKind::Variable, Builtin::Exp, Number(), std::move(name), nullptr, nullptr}));
}

Expression Expression::make_sum(Expression a, Expression b) {
  return Expression(make_node({NodeKind::Sum, Builtin::Exp, Number(), "", a.node_, b.node_}));
}
Expression Expression::make_product(Expression a, Expression b) {
  return Expression(make_node({NodeKind::Product, Builtin::Exp, Number(), "", a.node_, b.node_}));
}
Expression Expression::make_quotient(Expression a, Expression b) {
  return Expression(make_node({NodeKind::Quotient, Builtin::Exp, Number(), "", a.node_, b.node_}));
}
Expression Expression::make_power(Expression a, Expression b) {
  return Expression(make_node({NodeKind::Power, Builtin::Exp, Number(), "", a.node_, b.node_}));
}
Expression Expression::make_negate(Expression a) {
  return Expression(make_node({NodeKind::Negate, Builtin::Exp, Number(), "", a.node_, nullptr}));
}
Expression Expression::make_call(Builtin fn, Expression a) {
  return Expression(make_node({NodeKind::Call, fn, Number(), "", a.node_, nullptr}));
}

const Number& Expression::number() const {
  if (kind() != NodeKind::Constant) throw Error("not a constant node");
  return node_->value;
}
const std::string& Expression::name() const {
  if (kind() != NodeKind::Variable) throw Error("not a variable node");
  return node_->name;
}
Builtin Expression::func() const {
  if (kind() != NodeKind::Call) throw Error("not a call node");
  return node_->fn;
}
Expression Expression::left() const {
  if (!node_->a) throw Error("node has no operand");
  return Expression(node_->a);
}
Expression Expression::right() const {
  if (!node_->b) throw Error("node has no right operand");
  return Expression(node_->b);
}

bool Expression::is_zero() const { return kind() == NodeKind::Constant && node_->value.is_zero(); }
bool Expression::is_one() const { return kind() == NodeKind::Constant && node_->value.is_one(); }

// ---------------------------------------------------------------------------
// folding builders

Expression operator+(const Expression& a, const Expression& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.number() + b.number());
  return Expression::make_sum(a, b);
}

Expression operator-(const Expression& a) {
  if (a.is_constant()) return Expression::constant(-a.number());
  if (a.kind() == NodeKind::Negate) return a.operand();
  return Expression::make_negate(a);
}

Expression operator-(const Expression& a, const Expression& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.number() - b.number());
  return Expression::make_sum(a, -b);
}

Expression operator*(const Expression& a, const Expression& b) {
  if (a.is_zero() || b.is_zero()) return Expression();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.number() * b.number());
  return Expression::make_product(a, b);
}

Expression operator/(const Expression& a, const Expression& b) {
  if (b.is_one()) return a;
  if (a.is_zero()) return Expression();
  if (a.is_constant() && b.is_constant() && !b.number().is_zero()) {
    return Expression::constant(a.number() / b.number());
  }
  return Expression::make_quotient(a, b);
}

Expression pow(const Expression& base, const Expression& exponent) {
  if (exponent.is_zero()) return Expression::integer(1);
  if (exponent.is_one()) return base;
  if (base.is_constant() && exponent.is_constant()) {
    const Number& b = base.number();
    const Number& e = exponent.number();
    if (e.is_integer()) {
      if (auto folded = Number::int_pow(b, e.num())) return Expression::constant(*folded);
    } else if (b.value() > 0.0) {
      return Expression::real(std::pow(b.value(), e.value()));
    }
  }
  return Expression::make_power(base, exponent);
}

Expression pow(const Expression& base, std::int64_t exponent) {
  return pow(base, Expression::integer(exponent));
}

Expression exp(const Expression& a) {
  if (a.is_zero()) return Expression::integer(1);
  return Expression::make_call(Builtin::Exp, a);
}
Expression ln(const Expression& a) {
  if (a.is_one()) return Expression::integer(0);
  return Expression::make_call(Builtin::Ln, a);
}
Expression sin(const Expression& a) {
  if (a.is_zero()) return Expression();
  return Expression::make_call(Builtin::Sin, a);
}
Expression cos(const Expression& a) {
  if (a.is_zero()) return Expression::integer(1);
  return Expression::make_call(Builtin::Cos, a);
}

// ---------------------------------------------------------------------------
// structural equality

bool Expression::operator==(const Expression& o) const {
  if (node_ == o.node_) return true;
  if (node_->kind != o.node_->kind) return false;
  switch (node_->kind) {
    case NodeKind::Constant: return node_->value == o.node_->value;
    case NodeKind::Variable: return node_->name == o.node_->name;
    case NodeKind::Call:
      return node_->fn == o.node_->fn && left() == o.left();
    case NodeKind::Negate:
      return left() == o.left();
    default:
      return left() == o.left() && right() == o.right();
  }
}

// ---------------------------------------------------------------------------
// derivative (memoized per node so shared subtrees differentiate once)

namespace {

Expression derivative_rec(const Expression& e, std::string_view var,
                          std::unordered_map<const Node*, Expression>& memo) {
  auto it = memo.find(e.node());
  if (it != memo.end()) return it->second;

  Expression result;
  switch (e.kind()) {
    case NodeKind::Constant:
      break;
    case NodeKind::Variable:
      result = e.name() == var ? Expression::integer(1) : Expression();
      break;
    case NodeKind::Sum:
      result = derivative_rec(e.left(), var, memo) + derivative_rec(e.right(), var, memo);
      break;
    case NodeKind::Negate:
      result = -derivative_rec(e.operand(), var, memo);
      break;
    case NodeKind::Product: {
      Expression u = e.left(), v = e.right();
      result = derivative_rec(u, var, memo) * v + u * derivative_rec(v, var, memo);
      break;
    }
    case NodeKind::Quotient: {
      Expression u = e.left(), v = e.right();
      Expression du = derivative_rec(u, var, memo), dv = derivative_rec(v, var, memo);
      result = (du * v - u * dv) / pow(v, 2);
      break;
    }
    case NodeKind::Power: {
      Expression u = e.left(), w = e.right();
      Expression du = derivative_rec(u, var, memo);
      if (w.is_constant()) {
        result = w * pow(u, w - Expression::integer(1)) * du;
      } else {
        Expression dw = derivative_rec(w, var, memo);
        result = e * (dw * ln(u) + w * du / u);
      }
      break;
    }
    case NodeKind::Call: {
      Expression u = e.operand();
      Expression du = derivative_rec(u, var, memo);
      switch (e.func()) {
        case Builtin::Exp: result = e * du; break;
        case Builtin::Ln: result = du / u; break;
        case Builtin::Sin: result = cos(u) * du; break;
        case Builtin::Cos: result = -(sin(u) * du); break;
      }
      break;
    }
  }
  memo.emplace(e.node(), result);
  return result;
}

}  // namespace

Expression Expression::derivative(std::string_view var) const {
  std::unordered_map<const Node*, Expression> memo;
  return derivative_rec(*this, var, memo);
}

Expression differentiate(const Expression& e, const Chart& chart, std::string_view var) {
  if (!chart.index_of(var)) throw UnknownIdentifier(std::string(var));
  return e.derivative(var);
}

// ---------------------------------------------------------------------------
// simplify: conservative bottom-up pass through the folding builders plus
// constant evaluation of function calls at exact identity arguments

namespace {

// Gathers the multiplicative spine of a product: constant factors (including
// constant denominators) accumulate exactly into acc, everything else is kept
// in order.  Zero denominators stay as factors so evaluation still fails.
void gather_factors(const Expression& x, Number& acc, std::vector<Expression>& factors) {
  switch (x.kind()) {
    case NodeKind::Product:
      gather_factors(x.left(), acc, factors);
      gather_factors(x.right(), acc, factors);
      return;
    case NodeKind::Quotient:
      if (x.right().is_constant() && !x.right().number().is_zero()) {
        gather_factors(x.left(), acc, factors);
        acc = acc / x.right().number();
        return;
      }
      break;
    case NodeKind::Constant:
      acc = acc * x.number();
      return;
    case NodeKind::Negate:
      acc = acc * Number::integer(-1);
      gather_factors(x.operand(), acc, factors);
      return;
    default:
      break;
  }
  factors.push_back(x);
}

// Rebuilds a product spine with at most one constant, leftmost: x*2 becomes
// 2*x, 2*x*2/4 collapses to x.  Children are assumed already simplified.
Expression collect_constants(const Expression& e) {
  Number acc = Number::integer(1);
  std::vector<Expression> factors;
  gather_factors(e, acc, factors);
  if (acc.is_zero() || factors.empty()) return Expression::constant(acc);

  // sign hoists into an explicit negation so sums print subtractively and
  // reparse to the same tree
  bool negate = acc.negative();
  if (negate) acc = -acc;
  std::size_t i = 0;
  Expression out = acc.is_one() ? factors[i++] : Expression::constant(acc);
  for (; i < factors.size(); ++i) out = Expression::make_product(out, factors[i]);
  return negate ? -out : out;
}

Expression simplify_rec(const Expression& e, std::unordered_map<const Node*, Expression>& memo) {
  auto it = memo.find(e.node());
  if (it != memo.end()) return it->second;

  Expression result = e;
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Variable:
      break;
    case NodeKind::Sum: {
      Expression a = simplify_rec(e.left(), memo), b = simplify_rec(e.right(), memo);
      result = a + b;
      if (result.kind() == NodeKind::Sum) {
        // structurally matched u + (-u) cancels
        if (result.right().kind() == NodeKind::Negate &&
            result.right().operand() == result.left()) {
          result = Expression::integer(0);
        } else if (result.left().kind() == NodeKind::Negate &&
                   result.left().operand() == result.right()) {
          result = Expression::integer(0);
        }
      }
      if (result == e) result = e;  // unchanged: keep original node identity
      break;
    }
    case NodeKind::Product: {
      Expression a = simplify_rec(e.left(), memo), b = simplify_rec(e.right(), memo);
      result = a * b;
      if (result.kind() == NodeKind::Product) result = collect_constants(result);
      if (result == e) result = e;
      break;
    }
    case NodeKind::Quotient: {
      Expression a = simplify_rec(e.left(), memo), b = simplify_rec(e.right(), memo);
      result = a / b;
      if (result.kind() == NodeKind::Quotient) result = collect_constants(result);
      if (result == e) result = e;
      break;
    }
    case NodeKind::Power: {
      Expression a = simplify_rec(e.left(), memo), b = simplify_rec(e.right(), memo);
      result = pow(a, b);
      if (result.kind() == NodeKind::Power && result.left().same_node(e.left()) &&
          result.right().same_node(e.right())) {
        result = e;
      }
      break;
    }
    case NodeKind::Negate: {
      Expression a = simplify_rec(e.operand(), memo);
      result = -a;
      if (result.kind() == NodeKind::Negate && result.operand().same_node(e.operand())) {
        result = e;
      }
      break;
    }
    case NodeKind::Call: {
      Expression a = simplify_rec(e.operand(), memo);
      switch (e.func()) {
        case Builtin::Exp: result = exp(a); break;
        case Builtin::Ln: result = ln(a); break;
        case Builtin::Sin: result = sin(a); break;
        case Builtin::Cos: result = cos(a); break;
      }
      if (result.kind() == NodeKind::Call && result.operand().same_node(e.operand())) {
        result = e;
      }
      break;
    }
  }
  memo.emplace(e.node(), result);
  return result;
}

}  // namespace

Expression Expression::simplified() const {
  std::unordered_map<const Node*, Expression> memo;
  return simplify_rec(*this, memo);
}

Expression simplify(const Expression& e) { return e.simplified(); }

// ---------------------------------------------------------------------------
// evaluation (memoized per node: shared subtrees evaluate once)

namespace {

double evaluate_rec(const Expression& e, const Point& p,
                    std::unordered_map<const Node*, double>& memo) {
  auto it = memo.find(e.node());
  if (it != memo.end()) return it->second;

  auto fail = [&e](const char* msg) { throw DomainError(msg, e.str_truncated()); };
  double result = 0.0;
  switch (e.kind()) {
    case NodeKind::Constant:
      result = e.number().value();
      break;
    case NodeKind::Variable: {
      auto idx = p.chart()->index_of(e.name());
      if (!idx) throw UnknownIdentifier(e.name());
      result = p[*idx];
      break;
    }
    case NodeKind::Sum:
      result = evaluate_rec(e.left(), p, memo) + evaluate_rec(e.right(), p, memo);
      break;
    case NodeKind::Product:
      result = evaluate_rec(e.left(), p, memo) * evaluate_rec(e.right(), p, memo);
      break;
    case NodeKind::Quotient:
      result = detail::eval_div(evaluate_rec(e.left(), p, memo), evaluate_rec(e.right(), p, memo), fail);
      break;
    case NodeKind::Power: {
      Expression ex = e.right();
      double base = evaluate_rec(e.left(), p, memo);
      if (ex.is_constant() && ex.number().is_integer()) {
        result = detail::eval_pow_int(base, ex.number().num(), fail);
      } else {
        result = detail::eval_pow(base, evaluate_rec(ex, p, memo), fail);
      }
      break;
    }
    case NodeKind::Negate:
      result = -evaluate_rec(e.operand(), p, memo);
      break;
    case NodeKind::Call: {
      double u = evaluate_rec(e.operand(), p, memo);
      switch (e.func()) {
        case Builtin::Exp: result = std::exp(u); break;
        case Builtin::Ln: result = detail::eval_ln(u, fail); break;
        case Builtin::Sin: result = std::sin(u); break;
        case Builtin::Cos: result = std::cos(u); break;
      }
      break;
    }
  }
  if (!std::isfinite(result)) fail("non-finite value");
  memo.emplace(e.node(), result);
  return result;
}

}  // namespace

double Expression::evaluate(const Point& p) const {
  std::unordered_map<const Node*, double> memo;
  return evaluate_rec(*this, p, memo);
}

double evaluate(const Expression& e, const Point& p) { return e.evaluate(p); }

// ---------------------------------------------------------------------------
// printing

namespace {

// precedence levels for parenthesization: sum 1, product/quotient 2,
// unary minus 3, power 4, atoms 6
int print_level(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::Sum: return 1;
    case NodeKind::Product:
    case NodeKind::Quotient: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Power: return 4;
    case NodeKind::Constant: {
      const Number& n = e.number();
      if (n.exact() && n.den() != 1) return 2;  // prints as a ratio
      if (n.negative()) return 3;               // prints with a leading minus
      return 6;
    }
    default: return 6;
  }
}

// budget caps output size for error messages on heavily shared trees
void print_rec(const Expression& e, int need, std::string& out, std::size_t* budget) {
  if (budget && out.size() >= *budget) return;
  bool parens = print_level(e) < need;
  if (parens) out += '(';
  switch (e.kind()) {
    case NodeKind::Constant:
      out += e.number().str();
      break;
    case NodeKind::Variable:
      out += e.name();
      break;
    case NodeKind::Sum: {
      print_rec(e.left(), 1, out, budget);
      Expression b = e.right();
      if (b.kind() == NodeKind::Negate) {
        out += " - ";
        print_rec(b.operand(), 2, out, budget);
      } else if (b.is_constant() && b.number().negative()) {
        out += " - ";
        print_rec(Expression::constant(-b.number()), 2, out, budget);
      } else {
        out += " + ";
        print_rec(b, 2, out, budget);
      }
      break;
    }
    case NodeKind::Product:
      print_rec(e.left(), 2, out, budget);
      out += "*";
      print_rec(e.right(), 4, out, budget);
      break;
    case NodeKind::Quotient:
      print_rec(e.left(), 2, out, budget);
      out += "/";
      print_rec(e.right(), 4, out, budget);
      break;
    case NodeKind::Negate:
      out += "-";
      print_rec(e.operand(), 4, out, budget);
      break;
    case NodeKind::Power:
      print_rec(e.left(), 5, out, budget);
      out += "^";
      print_rec(e.right(), 3, out, budget);
      break;
    case NodeKind::Call:
      out += builtin_name(e.func());
      out += "(";
      print_rec(e.operand(), 0, out, budget);
      out += ")";
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string Expression::str() const {
  std::string out;
  print_rec(*this, 0, out, nullptr);
  return out;
}

std::string Expression::str_truncated(std::size_t max_chars) const {
  std::string out;
  std::size_t budget = max_chars;
  print_rec(*this, 0, out, &budget);
  if (out.size() >= max_chars) {
    out.resize(max_chars);
    out += "...";
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void collect_rec(const Expression& e, std::set<std::string>& out,
                 std::set<const Node*>& seen) {
  if (!seen.insert(e.node()).second) return;
  switch (e.kind()) {
    case NodeKind::Constant:
      break;
    case NodeKind::Variable:
      out.insert(e.name());
      break;
    case NodeKind::Negate:
    case NodeKind::Call:
      collect_rec(e.operand(), out, seen);
      break;
    default:
      collect_rec(e.left(), out, seen);
      collect_rec(e.right(), out, seen);
      break;
  }
}

}  // namespace

void Expression::collect_variables(std::set<std::string>& out) const {
  std::set<const Node*> seen;
  collect_rec(*this, out, seen);
}

void Expression::validate_over(const Chart& chart) const {
  std::set<std::string> vars;
  collect_variables(vars);
  for (const auto& v : vars) {
    if (!chart.index_of(v)) throw UnknownIdentifier(v);
  }
}

}  // namespace jacobi
