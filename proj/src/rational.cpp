#include "kfree/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "kfree/errors.hpp"

namespace kfree {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw CapacityError("rational component exceeds 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw DomainError("malformed rational component: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  i128 n = num;
  i128 d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const auto g = std::gcd(static_cast<std::uint64_t>(n < 0 ? -n : n), static_cast<std::uint64_t>(d));
  if (g > 1) {
    n /= static_cast<i128>(g);
    d /= static_cast<i128>(g);
  }
  num_ = narrow(n);
  den_ = narrow(d);
}

std::int64_t Rational::floor_mul_div(std::uint64_t n, std::uint64_t d) const {
  if (d == 0) throw DomainError("floor_mul_div by zero");
  // n*num fits in 127 bits signed; den*d needs up to 127 bits unsigned.
  const i128 top = static_cast<i128>(n) * num_;
  const u128 bottom = static_cast<u128>(den_) * d;
  if (top >= 0) {
    return narrow(static_cast<i128>(static_cast<u128>(top) / bottom));
  }
  const u128 mag = static_cast<u128>(-top);
  const u128 q = (mag + bottom - 1) / bottom;
  return narrow(-static_cast<i128>(q));
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text), 1);
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x) || x <= 0.0) throw DomainError("dyadic conversion needs a finite positive value");
  int exp2 = 0;
  std::frexp(x, &exp2);  // x = f * 2^exp2, f in [0.5, 1)
  // 53 significant bits => scale by 2^(53 - exp2), capped so the denominator fits.
  int shift = 53 - exp2;
  if (shift > 62) shift = 62;
  if (shift < 0) {
    const double r = std::nearbyint(x);
    if (r >= 9.2e18) throw CapacityError("value too large for a 64-bit rational");
    return Rational(static_cast<std::int64_t>(r), 1);
  }
  const double scaled = std::nearbyint(std::ldexp(x, shift));
  if (scaled < 1.0) throw CapacityError("value too small for a 62-bit dyadic denominator");
  return Rational(static_cast<std::int64_t>(scaled), std::int64_t{1} << shift);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const i128 lhs = static_cast<i128>(a.num_) * b.den_;
  const i128 rhs = static_cast<i128>(b.num_) * a.den_;
  return lhs <=> rhs;
}

Rational Rational::operator*(std::int64_t n) const {
  const auto g = std::gcd(static_cast<std::uint64_t>(n < 0 ? -n : n), static_cast<std::uint64_t>(den_));
  return Rational(narrow(static_cast<i128>(num_) * (n / static_cast<std::int64_t>(g))),
                  den_ / static_cast<std::int64_t>(g));
}

Rational Rational::operator+(std::int64_t n) const {
  return Rational(narrow(static_cast<i128>(n) * den_ + num_), den_);
}

std::string to_string(const BigRational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace kfree
