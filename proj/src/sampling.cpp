#include "jacobi/sampling.hpp"

#include "jacobi/errors.hpp"

namespace jacobi {

SampleBox SampleBox::uniform(std::size_t dimension, double lo, double hi) {
  SampleBox box;
  box.lo.assign(dimension, lo);
  box.hi.assign(dimension, hi);
  return box;
}

double SampleRng::uniform01() {
  // 53 mantissa bits, exact in double, value in [0, 1)
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double SampleRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t SampleRng::derive(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream); decorrelates sub-streams
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Point draw_point(SampleRng& rng, const ChartPtr& chart, const SampleBox& box) {
  if (box.lo.size() != chart->dimension() || box.hi.size() != chart->dimension()) {
    throw ChartMismatch("sampling box dimension does not match chart");
  }
  std::vector<double> v(chart->dimension());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = rng.uniform(box.lo[i], box.hi[i]);
  }
  return Point(chart, std::move(v));
}

Point draw_point_where(SampleRng& rng, const ChartPtr& chart, const SampleBox& box,
                       const std::function<bool(const Point&)>& pred, int max_attempts) {
  for (int k = 0; k < max_attempts; ++k) {
    Point p = draw_point(rng, chart, box);
    if (pred(p)) return p;
  }
  throw DegenerateSampling("no admissible sample point found in " +
                           std::to_string(max_attempts) + " attempts");
}

namespace {

void monomials_of_degree(const Chart& chart, std::size_t coord, int remaining,
                         Expression prefix, std::vector<Expression>& out) {
  if (coord + 1 == chart.dimension()) {
    out.push_back(prefix * pow(Expression::variable(chart.coordinate(coord)), remaining));
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    monomials_of_degree(chart, coord + 1, remaining - e,
                        prefix * pow(Expression::variable(chart.coordinate(coord)), e), out);
  }
}

}  // namespace

std::vector<Expression> monomial_basis(const Chart& chart, int max_degree) {
  std::vector<Expression> out;
  for (int total = 0; total <= max_degree; ++total) {
    monomials_of_degree(chart, 0, total, Expression::integer(1), out);
  }
  return out;
}

Expression random_polynomial(SampleRng& rng, const Chart& chart, int degree) {
  Expression poly = Expression::integer(0);
  for (const Expression& m : monomial_basis(chart, degree)) {
    poly = poly + Expression::real(rng.uniform(-1.0, 1.0)) * m;
  }
  return poly;
}

}  // namespace jacobi
