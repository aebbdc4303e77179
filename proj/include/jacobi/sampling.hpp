#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "jacobi/chart.hpp"
#include "jacobi/expression.hpp"

namespace jacobi {

/// Axis-aligned sampling box, one [lo, hi] interval per coordinate.
struct SampleBox {
  std::vector<double> lo;
  std::vector<double> hi;

  /// Same interval on every axis.
  static SampleBox uniform(std::size_t dimension, double lo, double hi);
};

/// Deterministic sample stream.  The mapping from raw 64-bit draws to doubles
/// is fixed here (53-bit mantissa scaling) instead of going through
/// std::uniform_real_distribution, whose output is implementation-defined;
/// reports must be reproducible across standard libraries.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  std::uint64_t next_u64() { return gen_(); }

  /// Derives an independent sub-seed for a named stream, so per-step or
  /// per-case generators never share state with the parent.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 gen_;
};

/// One point uniform in the box.
Point draw_point(SampleRng& rng, const ChartPtr& chart, const SampleBox& box);

/// Draws until pred accepts, up to max_attempts; throws DegenerateSampling
/// when the budget is exhausted.
Point draw_point_where(SampleRng& rng, const ChartPtr& chart, const SampleBox& box,
                       const std::function<bool(const Point&)>& pred,
                       int max_attempts = 200);

/// All monomials of total degree <= max_degree, graded order, leading
/// coordinate exponent decreasing within each degree.  Starts with the
/// constant 1.
std::vector<Expression> monomial_basis(const Chart& chart, int max_degree);

/// Polynomial of total degree <= degree with coefficients uniform in [-1, 1].
Expression random_polynomial(SampleRng& rng, const Chart& chart, int degree);

}  // namespace jacobi
