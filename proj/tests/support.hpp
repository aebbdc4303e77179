#pragma once

// Fixtures and oracles shared across the test binaries.  The finite
// difference helpers are deliberately independent of the library's own
// differentiation so the two can disagree when one of them is wrong.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "jacobi/chart.hpp"
#include "jacobi/expression.hpp"
#include "jacobi/parser.hpp"
#include "jacobi/sampling.hpp"
#include "jacobi/structures.hpp"

namespace support {

using namespace jacobi;

inline ChartPtr plane() { return make_chart({"x1", "x2"}); }

inline JacobiStructure symplectic_plane() {
  JacobiStructure J(plane());
  J.P.set_upper(0, 1, Expression::integer(1));
  return J;
}

inline JacobiStructure symplectic_r4() {
  JacobiStructure J(make_chart({"x1", "x2", "x3", "x4"}));
  J.P.set_upper(0, 1, Expression::integer(1));
  J.P.set_upper(2, 3, Expression::integer(1));
  return J;
}

// P = d1^d2 - x2 d2^d3, a = d3.  The sign of a is load bearing: flipping it
// breaks both structure equations, which pins down the orientation
// conventions of the wedge and Lie derivative formulas.
inline JacobiStructure contact_r3() {
  auto c = make_chart({"x1", "x2", "x3"});
  JacobiStructure J(c);
  J.P.set_upper(0, 1, Expression::integer(1));
  J.P.set_upper(1, 2, parse_expr("-x2", *c));
  J.a.set(2, Expression::integer(1));
  return J;
}

inline JacobiStructure pure_vector(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  JacobiStructure J(make_chart(std::move(names)));
  for (std::size_t k = 0; k < n; ++k) J.a.set(k, Expression::integer(1));
  return J;
}

// --- finite differences -------------------------------------------------

inline double fd_partial(const Expression& e, const ChartPtr& chart, std::vector<double> x,
                         std::size_t k, double h) {
  x[k] += h;
  double up = evaluate(e, Point(chart, x));
  x[k] -= 2 * h;
  double dn = evaluate(e, Point(chart, x));
  return (up - dn) / (2 * h);
}

struct FdEstimate {
  double value = 0.0;
  bool reliable = false;  // h and h/2 agree, so truncation error is tame here
};

inline FdEstimate fd_partial_checked(const Expression& e, const ChartPtr& chart,
                                     const std::vector<double>& x, std::size_t k,
                                     double h = 1e-5) {
  FdEstimate r;
  double coarse = fd_partial(e, chart, x, k, h);
  r.value = fd_partial(e, chart, x, k, h / 2);
  r.reliable = std::fabs(coarse - r.value) <= 1e-4 * (1.0 + std::fabs(r.value));
  return r;
}

// --- random smooth expressions -------------------------------------------

// Draws from a grammar tuned to stay finite-difference friendly on [-1,1]^n:
// bounded leaves, damped exponentials, denominators shifted away from zero.
class ExprGen {
 public:
  ExprGen(ChartPtr chart, std::uint64_t seed) : chart_(std::move(chart)), rng_(seed) {}

  Expression draw(int depth = 4) { return gen(depth); }

  Point point(double lo = -1.0, double hi = 1.0) {
    std::vector<double> x(chart_->dimension());
    for (double& v : x) v = rng_.uniform(lo, hi);
    return Point(chart_, std::move(x));
  }

 private:
  Expression gen(int depth) {
    if (depth <= 0) return leaf();
    switch (rng_.next_u64() % 8) {
      case 0: return leaf();
      case 1: return gen(depth - 1) + gen(depth - 1);
      case 2: return gen(depth - 1) - gen(depth - 1);
      case 3: return gen(depth - 1) * gen(depth - 1);
      case 4: return sin(gen(depth - 1));
      case 5: return cos(gen(depth - 1));
      case 6: return exp(Expression::rational(3, 10) * gen(depth - 1));
      default: {
        Expression d = gen(depth - 2 < 0 ? 0 : depth - 2);
        return gen(depth - 1) / (Expression::integer(2) + d * d);
      }
    }
  }

  Expression leaf() {
    if (rng_.next_u64() % 2)
      return Expression::variable(chart_->coordinate(rng_.next_u64() % chart_->dimension()));
    return Expression::real(rng_.uniform(-1.5, 1.5));
  }

  ChartPtr chart_;
  SampleRng rng_;
};

inline double rel_diff(double a, double b) { return std::fabs(a - b) / (1.0 + std::fabs(b)); }

}  // namespace support
