#include "kfree/arith.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kfree/compensated.hpp"
#include "kfree/errors.hpp"

namespace kfree {

std::uint32_t SieveTables::check(std::uint32_t n) const {
  if (n < 1 || n > limit_) {
    throw DomainError("n=" + std::to_string(n) + " outside sieve range [1, " + std::to_string(limit_) + "]");
  }
  return n;
}

SieveTables build_sieve(std::uint64_t limit, std::size_t memory_ceiling) {
  if (limit < 1) throw DomainError("sieve limit must be >= 1");
  if (limit >= std::numeric_limits<std::uint32_t>::max()) throw CapacityError("sieve limit exceeds 32 bits");
  const std::size_t bytes_per_entry = sizeof(std::uint32_t) * 2 + sizeof(std::int8_t);
  if ((limit + 1) * bytes_per_entry > memory_ceiling) {
    throw CapacityError("sieve to " + std::to_string(limit) + " exceeds memory ceiling of " +
                        std::to_string(memory_ceiling) + " bytes");
  }

  const auto q = static_cast<std::uint32_t>(limit);
  SieveTables t;
  t.limit_ = q;
  t.spf_.assign(q + 1, 0);
  t.mu_.assign(q + 1, 0);
  t.rad_.assign(q + 1, 0);
  t.mu_[1] = 1;
  t.rad_[1] = 1;
  t.spf_[1] = 1;

  for (std::uint32_t i = 2; i <= q; ++i) {
    if (t.spf_[i] == 0) {
      t.spf_[i] = i;
      t.mu_[i] = -1;
      t.rad_[i] = i;
      t.primes_.push_back(i);
    }
    const std::uint32_t si = t.spf_[i];
    for (const std::uint32_t p : t.primes_) {
      if (p > si) break;
      const std::uint64_t m = std::uint64_t{p} * i;
      if (m > q) break;
      t.spf_[m] = p;
      if (p == si) {
        t.mu_[m] = 0;
        t.rad_[m] = t.rad_[i];
      } else {
        t.mu_[m] = static_cast<std::int8_t>(-t.mu_[i]);
        t.rad_[m] = t.rad_[i] * p;
      }
    }
  }
  return t;
}

Factorization factorize(std::uint32_t n, const SieveTables& tables) {
  tables.spf(n);  // range check
  Factorization f;
  while (n > 1) {
    const std::uint32_t p = tables.spf_unchecked(n);
    std::uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.factors[f.size++] = {p, e};
  }
  return f;
}

std::uint32_t radical(std::uint32_t n, const SieveTables& tables) { return tables.rad(n); }

std::uint64_t euler_phi(std::uint32_t n, const SieveTables& tables) {
  std::uint64_t phi = n;
  for (const auto& [p, e] : factorize(n, tables).view()) phi = phi / p * (p - 1);
  return phi;
}

std::uint64_t divisor_count(std::uint32_t n, const SieveTables& tables) {
  std::uint64_t d = 1;
  for (const auto& [p, e] : factorize(n, tables).view()) d *= e + 1;
  return d;
}

namespace {

void require_squarefree(std::uint32_t qbar, const SieveTables& tables) {
  if (!tables.squarefree(qbar)) throw DomainError(std::to_string(qbar) + " is not squarefree");
}

}  // namespace

std::uint64_t divisor_count_of_power(std::uint32_t qbar, std::uint32_t e, const SieveTables& tables) {
  require_squarefree(qbar, tables);
  if (e < 1) throw DomainError("exponent must be >= 1");
  const auto omega = factorize(qbar, tables).size;
  std::uint64_t d = 1;
  for (std::size_t i = 0; i < omega; ++i) {
    if (__builtin_mul_overflow(d, std::uint64_t{e} + 1, &d)) throw CapacityError("d(qbar^e) overflows 64 bits");
  }
  return d;
}

BigInt sigma_of_radical_power(std::uint32_t qbar, int k, const SieveTables& tables) {
  require_squarefree(qbar, tables);
  if (k < 2) throw DomainError("k must be >= 2");
  BigInt sigma = 1;
  for (const auto& [p, e] : factorize(qbar, tables).view()) {
    // 1 + p + ... + p^(k-1)
    BigInt term = 1;
    BigInt power = 1;
    for (int i = 1; i < k; ++i) {
      power *= p;
      term += power;
    }
    sigma *= term;
  }
  return sigma;
}

bool is_power_free(std::uint32_t n, int j, const SieveTables& tables) {
  if (j < 2) throw DomainError("power-freeness needs j >= 2");
  for (const auto& [p, e] : factorize(n, tables).view()) {
    if (e >= static_cast<std::uint32_t>(j)) return false;
  }
  return true;
}

std::int64_t count_coprime_up_to(std::int64_t n, std::span<const std::uint32_t> primes) {
  if (n <= 0) return 0;
  // Walk the 2^omega subsets; a product above n contributes zero and prunes
  // every superset reached through it.
  std::int64_t total = 0;
  struct Frame {
    std::size_t next;
    std::int64_t d;
    int sign;
  };
  std::array<Frame, 1 + Factorization::kMaxPrimes * 8> stack{};
  std::size_t top = 0;
  stack[top++] = {0, 1, 1};
  while (top > 0) {
    const Frame f = stack[--top];
    total += f.sign * (n / f.d);
    for (std::size_t i = f.next; i < primes.size(); ++i) {
      // primes ascend, so once d*p exceeds n every later prime does too
      std::int64_t nd = 0;
      if (__builtin_mul_overflow(f.d, static_cast<std::int64_t>(primes[i]), &nd) || nd > n) break;
      stack[top++] = {i + 1, nd, -f.sign};
    }
  }
  return total;
}

std::int64_t two_param_totient(const Rational& x, std::uint32_t q, const SieveTables& tables) {
  if (!x.positive()) throw DomainError("two_param_totient needs x > 0");
  const auto f = factorize(q, tables);
  const std::int64_t n = x.floor_mul_div(q);
  if (n < 1) return 0;
  std::array<std::uint32_t, Factorization::kMaxPrimes> primes{};
  for (std::size_t i = 0; i < f.size; ++i) primes[i] = f.factors[i].p;
  return count_coprime_up_to(n, {primes.data(), f.size});
}

std::uint64_t squarefree_count(std::uint64_t t) {
  if (t < 1) throw DomainError("squarefree_count needs t >= 1");
  auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(t)));
  while (root * root > t) --root;
  while ((root + 1) * (root + 1) <= t) ++root;
  const SieveTables mu_table = build_sieve(root);
  std::int64_t total = 0;
  for (std::uint64_t d = 1; d <= root; ++d) {
    const int m = mu_table.mu_unchecked(static_cast<std::uint32_t>(d));
    if (m != 0) total += m * static_cast<std::int64_t>(t / (d * d));
  }
  return static_cast<std::uint64_t>(total);
}

ZetaValue zeta(int k, double rel_tol) {
  if (k < 2) throw DomainError("zeta(k) needs k >= 2");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("rel_tol must lie in (0, 1)");
  // Remainder sum_{n>N} n^-k lies in [(N+1)^(1-k), N^(1-k)] / (k-1); the
  // bracket is narrower than N^-k, so N^-k <= 2 rel_tol suffices (zeta >= 1).
  const double km = k - 1.0;
  auto n_terms = static_cast<std::uint64_t>(std::ceil(std::pow(1.0 / (2.0 * rel_tol), 1.0 / k)));
  if (n_terms < 1) n_terms = 1;
  KahanAccumulator<double> sum;
  for (std::uint64_t n = n_terms; n >= 1; --n) sum += std::pow(static_cast<double>(n), -k);
  const double nd = static_cast<double>(n_terms);
  const double lo = std::pow(nd + 1.0, -km) / km;
  const double hi = std::pow(nd, -km) / km;
  ZetaValue z;
  z.value = static_cast<double>(sum) + 0.5 * (lo + hi);
  const double eps = std::numeric_limits<double>::epsilon();
  z.error = 0.5 * (hi - lo) + 8.0 * eps * z.value;
  return z;
}

}  // namespace kfree
