#pragma once

#include <cmath>
#include <cstdint>

// Scalar evaluation kernels shared by the tree walker and the tape compiler,
// so both paths agree exactly on domain checks and special cases.

namespace jacobi::detail {

template <typename FailFn>
double eval_div(double num, double den, FailFn&& fail) {
  if (den == 0.0) fail("division by zero");
  return num / den;
}

template <typename FailFn>
double eval_ln(double x, FailFn&& fail) {
  if (x <= 0.0) fail("ln of non-positive value");
  return std::log(x);
}

template <typename FailFn>
double eval_pow_int(double base, std::int64_t e, FailFn&& fail) {
  if (base == 0.0 && e < 0) fail("zero raised to a negative power");
  if (e == 0) return 1.0;
  std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1 : static_cast<std::uint64_t>(e);
  if (k <= 64) {
    double acc = 1.0;
    double b = base;
    while (k > 0) {
      if (k & 1) acc *= b;
      b *= b;
      k >>= 1;
    }
    return e < 0 ? 1.0 / acc : acc;
  }
  return std::pow(base, static_cast<double>(e));
}

template <typename FailFn>
double eval_pow(double base, double e, FailFn&& fail) {
  if (base == 0.0) {
    if (e < 0.0) fail("zero raised to a negative power");
    return e == 0.0 ? 1.0 : 0.0;
  }
  if (base < 0.0) {
    if (e != std::floor(e)) fail("negative base with non-integer exponent");
    return std::pow(base, e);
  }
  return std::pow(base, e);
}

}  // namespace jacobi::detail
