#pragma once

// Brute-force reference implementations for the tests. Everything here works
// from trial division and direct enumeration, sharing no code path with the
// sieve-backed library.

#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "kfree/rational.hpp"

namespace oracle {

using kfree::BigInt;
using kfree::BigRational;

inline std::map<std::uint64_t, int> factor(std::uint64_t n) {
  std::map<std::uint64_t, int> f;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  }
  if (n > 1) ++f[n];
  return f;
}

inline bool power_free(std::uint64_t n, int j) {
  for (const auto& [p, e] : factor(n)) {
    if (e >= j) return false;
  }
  return true;
}

inline int mobius(std::uint64_t n) {
  int mu = 1;
  for (const auto& [p, e] : factor(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

inline std::uint64_t radical(std::uint64_t n) {
  std::uint64_t r = 1;
  for (const auto& [p, e] : factor(n)) r *= p;
  return r;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> d;
  for (std::uint64_t i = 1; i <= n; ++i) {
    if (n % i == 0) d.push_back(i);
  }
  return d;
}

inline std::uint64_t totient(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t m = 1; m <= n; ++m) {
    if (std::gcd(m, n) == 1) ++c;
  }
  return c;
}

inline BigInt sigma(const BigInt& n) {
  BigInt s = 0;
  for (BigInt i = 1; i <= n; ++i) {
    if (n % i == 0) s += i;
  }
  return s;
}

// #{1 <= m <= q x : gcd(m, q) = 1} by enumerating m.
inline std::int64_t phi2(const kfree::Rational& x, std::uint64_t q) {
  std::int64_t c = 0;
  // m <= q*x  <=>  m*den <= q*num
  for (std::int64_t m = 1; static_cast<__int128>(m) * x.den() <= static_cast<__int128>(q) * x.num(); ++m) {
    if (std::gcd(static_cast<std::uint64_t>(m), q) == 1) ++c;
  }
  return c;
}

// f_k(q) straight from its defining product.
inline BigRational fk(std::uint64_t q, int k) {
  if (!power_free(q, k + 1)) return 0;
  BigRational f = 1;
  for (const auto& [p, e] : factor(q)) {
    BigInt pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    f /= BigRational(pk - 1);
  }
  return f;
}

// Z_k(x) truncated at q <= q_max (and rad(q) <= radical_cap when nonzero),
// from the defining sum with enumerated phi.
inline BigRational z_sum(const kfree::Rational& x, int k, std::uint64_t q_max, std::uint64_t radical_cap = 0) {
  BigRational z = 0;
  for (std::uint64_t q = 1; q <= q_max; ++q) {
    if (static_cast<__int128>(q) * x.num() < x.den()) continue;  // q < 1/x
    if (radical_cap != 0 && radical(q) > radical_cap) continue;
    const BigRational f = fk(q, k);
    if (f == 0) continue;
    z += f * f * phi2(x, q);
  }
  return z;
}

}  // namespace oracle
