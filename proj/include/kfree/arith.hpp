#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kfree/rational.hpp"

namespace kfree {

// Default ceiling on sieve-style allocations (bytes).
inline constexpr std::size_t kDefaultMemoryCeiling = std::size_t{2} << 30;

class SieveTables;

// Linear (Euler) sieve over [1, limit]. Throws CapacityError if the tables
// would exceed memory_ceiling bytes or limit does not fit 32 bits.
SieveTables build_sieve(std::uint64_t limit, std::size_t memory_ceiling = kDefaultMemoryCeiling);

// Per-integer arithmetic data on [1, limit]: smallest prime factor, Moebius
// value and radical. Immutable once built; index 0 is unused.
class SieveTables {
 public:
  std::uint32_t limit() const { return limit_; }

  std::uint32_t spf(std::uint32_t n) const { return spf_[check(n)]; }
  int mu(std::uint32_t n) const { return mu_[check(n)]; }
  std::uint32_t rad(std::uint32_t n) const { return rad_[check(n)]; }
  bool squarefree(std::uint32_t n) const { return mu_[check(n)] != 0; }

  std::span<const std::uint32_t> primes() const { return primes_; }

  // Unchecked accessors for tight loops that have already validated n.
  std::uint32_t spf_unchecked(std::uint32_t n) const { return spf_[n]; }
  int mu_unchecked(std::uint32_t n) const { return mu_[n]; }

 private:
  friend SieveTables build_sieve(std::uint64_t, std::size_t);
  std::uint32_t check(std::uint32_t n) const;

  std::uint32_t limit_ = 0;
  std::vector<std::uint32_t> spf_;
  std::vector<std::int8_t> mu_;
  std::vector<std::uint32_t> rad_;
  std::vector<std::uint32_t> primes_;
};

struct PrimePower {
  std::uint32_t p;
  std::uint32_t e;
};

// Prime factorisation read off the spf table. Distinct primes ascending.
struct Factorization {
  static constexpr std::size_t kMaxPrimes = 16;
  std::array<PrimePower, kMaxPrimes> factors{};
  std::size_t size = 0;

  std::span<const PrimePower> view() const { return {factors.data(), size}; }
};

Factorization factorize(std::uint32_t n, const SieveTables& tables);

std::uint32_t radical(std::uint32_t n, const SieveTables& tables);
std::uint64_t euler_phi(std::uint32_t n, const SieveTables& tables);
std::uint64_t divisor_count(std::uint32_t n, const SieveTables& tables);

// d(qbar^e) = (e+1)^omega(qbar) for squarefree qbar.
std::uint64_t divisor_count_of_power(std::uint32_t qbar, std::uint32_t e, const SieveTables& tables);

// sigma(qbar^(k-1)) = prod_{p | qbar} (p^k - 1)/(p - 1), exact.
BigInt sigma_of_radical_power(std::uint32_t qbar, int k, const SieveTables& tables);

// True iff no p^j divides n.
bool is_power_free(std::uint32_t n, int j, const SieveTables& tables);

// #{1 <= m <= n : gcd(m, prod primes) = 1} by inclusion-exclusion over the
// squarefree divisors of prod primes. primes must be distinct and ascending.
std::int64_t count_coprime_up_to(std::int64_t n, std::span<const std::uint32_t> primes);

// phi(x, q) = #{1 <= m <= q*x : gcd(m, q) = 1} for exact rational x > 0.
std::int64_t two_param_totient(const Rational& x, std::uint32_t q, const SieveTables& tables);

// M(t) = #{n <= t : n squarefree}, via sum_{d <= sqrt t} mu(d) floor(t / d^2).
std::uint64_t squarefree_count(std::uint64_t t);

struct ZetaValue {
  double value = 0.0;
  double error = 0.0;  // certified |value - zeta(k)| <= error

  double upper() const { return value + error; }
  double lower() const { return value - error; }
};

// zeta(k) from the partial sum over n <= N plus the midpoint of the integral
// bracket for the remainder; N is chosen so the bracket meets rel_tol.
ZetaValue zeta(int k, double rel_tol = 1e-12);

}  // namespace kfree
