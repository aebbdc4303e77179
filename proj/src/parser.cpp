#include "jacobi/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>

#include "jacobi/chart.hpp"
#include "jacobi/errors.hpp"

namespace jacobi {

namespace {

struct Parser {
  std::string_view text;
  const Chart& chart;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, pos); }

  Expression parse_number() {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    bool is_real = false;
    if (pos < text.size() && text[pos] == '.') {
      is_real = true;
      ++pos;
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
        fail("expected digits after decimal point");
      }
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        is_real = true;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // 'e' starts an identifier, not an exponent
      }
    }
    std::string_view lit = text.substr(start, pos - start);
    if (!is_real) {
      std::int64_t v = 0;
      auto res = std::from_chars(lit.data(), lit.data() + lit.size(), v);
      if (res.ec == std::errc() && res.ptr == lit.data() + lit.size()) {
        return Expression::integer(v);
      }
      // fall through: integer too wide for 64 bits
    }
    double d = std::strtod(std::string(lit).c_str(), nullptr);
    return Expression::real(d);
  }

  Expression parse_base() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (c == '(') {
      ++pos;
      Expression e = parse_expr_level();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
        ++pos;
      }
      std::string name(text.substr(start, pos - start));
      if (consume('(')) {
        Builtin fn;
        if (name == "exp") fn = Builtin::Exp;
        else if (name == "ln") fn = Builtin::Ln;
        else if (name == "sin") fn = Builtin::Sin;
        else if (name == "cos") fn = Builtin::Cos;
        else throw UnknownIdentifier(name);
        Expression arg = parse_expr_level();
        if (!consume(')')) fail("expected ')'");
        return Expression::make_call(fn, arg);
      }
      if (!chart.index_of(name)) throw UnknownIdentifier(name);
      return Expression::variable(name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expression parse_factor() {
    Expression base = parse_base();
    if (consume('^')) {
      Expression e = parse_unary();
      return Expression::make_power(base, e);
    }
    return base;
  }

  Expression parse_unary() {
    if (consume('-')) return Expression::make_negate(parse_unary());
    return parse_factor();
  }

  Expression parse_term() {
    Expression acc = parse_unary();
    for (;;) {
      if (consume('*')) {
        acc = Expression::make_product(acc, parse_unary());
      } else if (consume('/')) {
        acc = Expression::make_quotient(acc, parse_unary());
      } else {
        return acc;
      }
    }
  }

  Expression parse_expr_level() {
    Expression acc = parse_term();
    for (;;) {
      if (consume('+')) {
        acc = Expression::make_sum(acc, parse_term());
      } else if (consume('-')) {
        acc = Expression::make_sum(acc, Expression::make_negate(parse_term()));
      } else {
        return acc;
      }
    }
  }
};

}  // namespace

Expression parse_expr(std::string_view text, const Chart& chart) {
  Parser p{text, chart};
  Expression e = p.parse_expr_level();
  if (!p.at_end()) p.fail("unexpected trailing input");
  return e;
}

}  // namespace jacobi
