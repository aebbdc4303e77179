#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "jacobi/errors.hpp"
#include "jacobi/evaluator.hpp"
#include "jacobi/expression.hpp"
#include "jacobi/number.hpp"
#include "jacobi/parser.hpp"

#include "support.hpp"

using namespace jacobi;
using support::ExprGen;

TEST_CASE("exact rational arithmetic stays exact") {
  Number third = Number::rational(1, 3);
  Number sum = third + Number::rational(1, 6);
  CHECK(sum.exact());
  CHECK(sum.num() == 1);
  CHECK(sum.den() == 2);
  CHECK((third * Number::integer(3)).is_one());
  CHECK((Number::integer(7) / Number::integer(7)).is_one());
  CHECK(Number::rational(2, -4).str() == "-1/2");
  CHECK(Number::rational(-2, -4).num() == 1);

  auto p = Number::int_pow(Number::rational(2, 3), -2);
  REQUIRE(p.has_value());
  CHECK(p->num() == 9);
  CHECK(p->den() == 4);
  CHECK_FALSE(Number::int_pow(Number::integer(0), -1).has_value());

  // products past the 64-bit range fall back to doubles instead of wrapping
  Number big = Number::integer(3037000500);
  Number sq = big * big;
  CHECK_FALSE(sq.exact());
  CHECK(sq.value() == doctest::Approx(9.223372037e18).epsilon(1e-6));
}

TEST_CASE("parser precedence and associativity") {
  auto c = make_chart({"x1", "x2"});
  Point p(c, {2.0, 0.5});

  CHECK(evaluate(parse_expr("1 + 2*3^2", *c), p) == 19.0);
  CHECK(evaluate(parse_expr("2^3^2", *c), p) == 512.0);      // right-assoc
  CHECK(evaluate(parse_expr("-x1^2", *c), p) == -4.0);       // unary binds looser than ^
  CHECK(evaluate(parse_expr("2^-1", *c), p) == 0.5);
  CHECK(evaluate(parse_expr("6/3/2", *c), p) == 1.0);        // left-assoc
  CHECK(evaluate(parse_expr("1 - 2 - 3", *c), p) == -4.0);
  CHECK(evaluate(parse_expr("exp(ln(x1))", *c), p) == doctest::Approx(2.0));
  CHECK(evaluate(parse_expr("sin(x2)^2 + cos(x2)^2", *c), p) == doctest::Approx(1.0));
  CHECK(evaluate(parse_expr("3/4*x1", *c), p) == 1.5);
}

TEST_CASE("syntax errors carry byte offsets") {
  auto c = make_chart({"x1"});
  CHECK_THROWS_AS(parse_expr("x1 + ", *c), SyntaxError);
  CHECK_THROWS_AS(parse_expr("(x1", *c), SyntaxError);
  CHECK_THROWS_AS(parse_expr("x1 y", *c), SyntaxError);
  CHECK_THROWS_AS(parse_expr("", *c), SyntaxError);
  try {
    parse_expr("x1 + * 2", *c);
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 5);
  }
  try {
    parse_expr("x1 + q2", *c);
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.name() == "q2");
  }
}

TEST_CASE("printing and reparsing is a fixpoint that preserves values") {
  // Rational constants print as "p/q" and reparse as a quotient node, so
  // tree identity is too strict; the printed string must be stable instead.
  auto c = make_chart({"x1", "x2", "x3"});
  ExprGen gen(c, 2024);
  for (int i = 0; i < 50; ++i) {
    for (Expression e : {gen.draw(4), simplify(gen.draw(4))}) {
      Expression back = parse_expr(e.str(), *c);
      CHECK(back.str() == e.str());
      Point p = gen.point();
      CHECK(support::rel_diff(evaluate(back, p), evaluate(e, p)) <= 1e-15);
    }
  }
  // trees that came out of the parser do reparse to identical structure
  for (const char* text : {"x1 - x2*x3", "-(x1 + 1)/(2 - x3)", "sin(x1)^2*cos(x2)"}) {
    Expression e = parse_expr(text, *c);
    CHECK(parse_expr(e.str(), *c) == e);
  }
}

TEST_CASE("simplify preserves values and hits the expected normal forms") {
  auto c = make_chart({"x1", "x2", "x3"});
  ExprGen gen(c, 7);
  for (int i = 0; i < 50; ++i) {
    Expression e = gen.draw(4);
    Expression s = simplify(e);
    for (int k = 0; k < 20; ++k) {
      Point p = gen.point();
      double a = evaluate(e, p);
      double b = evaluate(s, p);
      CHECK(support::rel_diff(a, b) <= 1e-12);
    }
  }

  Expression x1 = Expression::variable("x1");
  CHECK(simplify(parse_expr("x1 - x1", *c)).str() == "0");
  CHECK(simplify(parse_expr("1*x1", *c)).str() == "x1");
  CHECK(simplify(parse_expr("x1^1", *c)).str() == "x1");
  CHECK(simplify(parse_expr("0*x1", *c)).str() == "0");
  CHECK(simplify(parse_expr("2*3 + 1", *c)).str() == "7");
  CHECK(simplify(parse_expr("exp(0)", *c)).str() == "1");
  CHECK(simplify(parse_expr("x1/1", *c)).str() == "x1");
  CHECK(simplify(parse_expr("--x1", *c)).str() == "x1");
  // already-canonical trees come back as the same node, not a copy
  CHECK(simplify(x1).same_node(x1));
}

TEST_CASE("derivatives match central differences") {
  auto c = make_chart({"x1", "x2", "x3"});
  ExprGen gen(c, 99);
  int reliable = 0, total = 0;
  for (int i = 0; i < 100; ++i) {
    Expression e = gen.draw(4);
    for (std::size_t k = 0; k < 3; ++k) {
      Expression d = differentiate(e, *c, c->coordinate(k));
      Point p = gen.point(-0.9, 0.9);
      std::vector<double> x(p.values().begin(), p.values().end());
      auto fd = support::fd_partial_checked(e, c, x, k);
      ++total;
      if (!fd.reliable) continue;  // steep spot; the estimate itself is suspect
      ++reliable;
      double exact = evaluate(d, p);
      CHECK(std::fabs(fd.value - exact) <= 1e-6 * (1.0 + std::fabs(exact)));
    }
  }
  // the generator is tuned so nearly every draw is checkable
  CHECK(reliable >= total * 9 / 10);
}

TEST_CASE("known derivatives") {
  auto c = make_chart({"x1", "x2"});
  Point p(c, {0.7, -0.3});
  auto d = [&](const char* f, const char* v) {
    return evaluate(differentiate(parse_expr(f, *c), *c, v), p);
  };
  CHECK(d("x1^3", "x1") == doctest::Approx(3 * 0.7 * 0.7));
  CHECK(d("x1*x2", "x2") == doctest::Approx(0.7));
  CHECK(d("exp(2*x1)", "x1") == doctest::Approx(2 * std::exp(1.4)));
  CHECK(d("ln(x1)", "x1") == doctest::Approx(1 / 0.7));
  CHECK(d("sin(x1)", "x1") == doctest::Approx(std::cos(0.7)));
  CHECK(d("cos(x1)", "x1") == doctest::Approx(-std::sin(0.7)));
  CHECK(d("x1/x2", "x2") == doctest::Approx(-0.7 / (0.3 * 0.3)));
  CHECK(d("x2^2", "x1") == 0.0);
}

TEST_CASE("compiled tape agrees with the tree walker") {
  auto c = make_chart({"x1", "x2", "x3"});
  ExprGen gen(c, 1234);
  std::vector<Expression> roots;
  for (int i = 0; i < 12; ++i) roots.push_back(gen.draw(4));
  Tape tape(roots, *c);
  CHECK(tape.root_count() == roots.size());

  for (int k = 0; k < 25; ++k) {
    Point p = gen.point();
    std::vector<double> got = tape.eval_at(p);
    for (std::size_t r = 0; r < roots.size(); ++r) {
      double want = evaluate(roots[r], p);
      CHECK(support::rel_diff(got[r], want) <= 1e-15);
    }
  }
}

TEST_CASE("tape shares repeated subtrees") {
  auto c = make_chart({"x1"});
  Expression e = parse_expr("exp(x1)", *c);
  Expression big = e * e + e;  // one exp node, used three times
  Tape tape({big}, *c);
  CHECK(tape.slot_count() <= 5);  // var, exp, mul, add and slack for a constant
}

TEST_CASE("domain errors match between evaluators") {
  auto c = make_chart({"x1"});
  struct Case {
    const char* text;
    double at;
  } cases[] = {
      {"1/x1", 0.0},
      {"ln(x1)", -1.0},
      {"x1^(1/2)", -4.0},
      {"(0*x1)^(0*x1 - 1)", 5.0},
  };
  for (const auto& cse : cases) {
    CAPTURE(cse.text);
    Expression e = parse_expr(cse.text, *c);
    Point p(c, {cse.at});
    CHECK_THROWS_AS(evaluate(e, p), DomainError);
    Tape tape({e}, *c);
    CHECK_THROWS_AS(tape.eval_at(p), DomainError);
    try {
      tape.eval_at(p);
    } catch (const DomainError& err) {
      CHECK(!err.subexpression().empty());
    }
  }
}

TEST_CASE("unbound variables are rejected at compile time") {
  auto c = make_chart({"x1"});
  Expression stray = Expression::variable("zz") + Expression::integer(1);
  CHECK_THROWS_AS(Tape({stray}, *c), UnknownIdentifier);
  CHECK_THROWS_AS(stray.validate_over(*c), UnknownIdentifier);
}

TEST_CASE("collect_variables and truncation") {
  auto c = make_chart({"x1", "x2", "x3"});
  Expression e = parse_expr("x1*sin(x3) + 2", *c);
  std::set<std::string> vars;
  e.collect_variables(vars);
  CHECK(vars == std::set<std::string>{"x1", "x3"});

  Expression long_expr = e;
  for (int i = 0; i < 6; ++i) long_expr = long_expr * long_expr + long_expr;
  std::string t = long_expr.str_truncated(120);
  CHECK(t.size() <= 124);
  CHECK(long_expr.str().size() > t.size());
}
