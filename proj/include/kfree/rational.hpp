#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace kfree {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Exact rational with 64-bit parts, always in lowest terms with den >= 1.
// Products against integers go through 128-bit intermediates, so callers
// can floor q*x/d exactly for any q, d below 2^63.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  BigRational to_big() const { return BigRational(BigInt(num_), BigInt(den_)); }

  bool positive() const { return num_ > 0; }

  // floor(n * this / d), exact. Requires d >= 1.
  std::int64_t floor_mul_div(std::uint64_t n, std::uint64_t d = 1) const;

  // "m/q" with q >= 1 always printed.
  std::string str() const;

  // Accepts "m/q" or a bare integer.
  static Rational parse(std::string_view text);

  // Nearest dyadic rational m / 2^e to a finite positive double, keeping as
  // many mantissa bits as a 62-bit denominator allows.
  static Rational from_double(double x);

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  Rational operator*(std::int64_t n) const;
  Rational operator+(std::int64_t n) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Text form of an exact big rational, also "m/q".
std::string to_string(const BigRational& r);

}  // namespace kfree
