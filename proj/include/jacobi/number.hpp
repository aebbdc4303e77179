#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

namespace jacobi {

/// Numeric literal: exact rational when it came from integer or ratio
/// literals, IEEE double otherwise.  Exact arithmetic falls back to double
/// on 64-bit overflow.
class Number {
 public:
  Number() = default;  // exact zero

  static Number integer(std::int64_t v) {
    Number n;
    n.exact_ = true;
    n.num_ = v;
    n.den_ = 1;
    return n;
  }
  static Number rational(std::int64_t num, std::int64_t den) {
    return from_wide(static_cast<__int128>(num), static_cast<__int128>(den));
  }
  static Number real(double v) {
    Number n;
    n.exact_ = false;
    n.real_ = v;
    return n;
  }

  bool exact() const { return exact_; }
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return exact_ && den_ == 1; }
  double value() const {
    return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : real_;
  }
  bool is_zero() const { return exact_ ? num_ == 0 : real_ == 0.0; }
  bool is_one() const { return exact_ ? (num_ == 1 && den_ == 1) : real_ == 1.0; }
  bool negative() const { return exact_ ? num_ < 0 : real_ < 0.0; }

  bool operator==(const Number& o) const {
    if (exact_ != o.exact_) return false;
    return exact_ ? (num_ == o.num_ && den_ == o.den_) : real_ == o.real_;
  }

  Number operator-() const {
    if (!exact_) return real(-real_);
    return from_wide(-static_cast<__int128>(num_), static_cast<__int128>(den_));
  }

  friend Number operator+(const Number& x, const Number& y) {
    if (x.exact_ && y.exact_)
      return from_wide(static_cast<__int128>(x.num_) * y.den_ + static_cast<__int128>(y.num_) * x.den_,
                       static_cast<__int128>(x.den_) * y.den_);
    return real(x.value() + y.value());
  }
  friend Number operator-(const Number& x, const Number& y) { return x + (-y); }
  friend Number operator*(const Number& x, const Number& y) {
    if (x.exact_ && y.exact_)
      return from_wide(static_cast<__int128>(x.num_) * y.num_,
                       static_cast<__int128>(x.den_) * y.den_);
    return real(x.value() * y.value());
  }
  /// Caller must reject zero divisors first.
  friend Number operator/(const Number& x, const Number& y) {
    if (x.exact_ && y.exact_)
      return from_wide(static_cast<__int128>(x.num_) * y.den_,
                       static_cast<__int128>(x.den_) * y.num_);
    return real(x.value() / y.value());
  }

  /// Integer power; nullopt when the result is undefined (0^negative).
  static std::optional<Number> int_pow(const Number& base, std::int64_t e) {
    if (base.is_zero() && e < 0) return std::nullopt;
    if (e == 0) return integer(1);
    if (!base.exact_) return real(std::pow(base.real_, static_cast<double>(e)));
    Number acc = integer(1);
    Number b = base;
    std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1 : static_cast<std::uint64_t>(e);
    while (k > 0) {
      if (k & 1) acc = acc * b;
      b = b * b;
      k >>= 1;
      if (!acc.exact_ || !b.exact_) {  // overflowed into doubles; finish there
        return real(std::pow(base.value(), static_cast<double>(e)));
      }
    }
    if (e < 0) return from_wide(static_cast<__int128>(acc.den_), static_cast<__int128>(acc.num_));
    return acc;
  }

  /// Literal text: "3", "-3/4", or a shortest round-trip decimal for doubles.
  std::string str() const {
    if (exact_) {
      std::string s = std::to_string(num_);
      if (den_ != 1) s += "/" + std::to_string(den_);
      return s;
    }
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), real_);
    std::string s(buf, res.ptr);
    // force a decimal marker so the text re-lexes as a double, not an integer
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
      s += ".0";
    }
    return s;
  }

 private:
  static Number from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (d == 0) return real(std::numeric_limits<double>::quiet_NaN());
    __int128 a = n < 0 ? -n : n;
    __int128 g = gcd_wide(a, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (n > lim || n < -lim || d > lim) {
      return real(static_cast<double>(static_cast<long double>(n) / static_cast<long double>(d)));
    }
    Number out;
    out.exact_ = true;
    out.num_ = static_cast<std::int64_t>(n);
    out.den_ = static_cast<std::int64_t>(d);
    return out;
  }
  static __int128 gcd_wide(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a < 0 ? -a : a;
  }

  bool exact_ = true;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double real_ = 0.0;
};

}  // namespace jacobi
