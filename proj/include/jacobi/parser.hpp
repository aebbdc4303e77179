#pragma once

#include <string_view>

#include "jacobi/expression.hpp"

namespace jacobi {

class Chart;

/// Parses infix expression text over the chart's coordinates.
///
/// Grammar (precedence ^ > unary - > * / > + -, right-associative ^):
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | factor
///   factor := base ('^' unary)?
///   base   := number | ident | ident '(' expr ')' | '(' expr ')'
///
/// Integer literals become exact constants, decimal or exponent literals
/// become doubles.  Throws SyntaxError with a byte offset on malformed
/// input and UnknownIdentifier for names outside the chart (the functions
/// exp, ln, sin, cos are reserved).
Expression parse_expr(std::string_view text, const Chart& chart);

}  // namespace jacobi
