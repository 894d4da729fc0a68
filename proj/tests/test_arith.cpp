#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kfree/arith.hpp"
#include "kfree/errors.hpp"
#include "oracles.hpp"

using namespace kfree;

TEST_CASE("rational stays in lowest terms and floors exactly") {
  const Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(r.str() == "-3/2");
  CHECK(Rational::parse("10/4") == Rational(5, 2));
  CHECK(Rational::parse("7") == Rational(7, 1));
  CHECK_THROWS_AS(Rational::parse("1/0"), DomainError);
  CHECK_THROWS_AS(Rational::parse("abc"), DomainError);

  // floor(q x / d), including exact integer boundaries
  CHECK(Rational(1, 3).floor_mul_div(6) == 2);
  CHECK(Rational(1, 3).floor_mul_div(5) == 1);
  CHECK(Rational(-1, 3).floor_mul_div(5) == -2);
  CHECK(Rational(1, 2).floor_mul_div(10, 3) == 1);
  CHECK(Rational(1, 1000000).floor_mul_div(999999) == 0);
  CHECK(Rational(1, 1000000).floor_mul_div(1000000) == 1);
  CHECK(Rational(1, 3) < Rational(1, 2));
}

TEST_CASE("dyadic conversion is exact for dyadic inputs and close otherwise") {
  CHECK(Rational::from_double(0.5) == Rational(1, 2));
  CHECK(Rational::from_double(0.375) == Rational(3, 8));
  const Rational r = Rational::from_double(1e-6);
  CHECK((r.den() & (r.den() - 1)) == 0);
  CHECK(std::abs(r.to_double() / 1e-6 - 1.0) < 1e-12);
  CHECK_THROWS_AS(Rational::from_double(-1.0), DomainError);
}

TEST_CASE("build_sieve examples") {
  const SieveTables one = build_sieve(1);
  CHECK(one.mu(1) == 1);
  CHECK(one.rad(1) == 1);

  const SieveTables t12 = build_sieve(12);
  CHECK(t12.mu(12) == 0);

  const SieveTables t30 = build_sieve(30);
  CHECK(t30.rad(30) == 30);
  CHECK(t30.mu(30) == -1);
  CHECK_THROWS_AS(t30.mu(31), DomainError);
  CHECK_THROWS_AS(build_sieve(1000, 64), CapacityError);
}

TEST_CASE("sieve tables agree with trial division") {
  const std::uint32_t limit = 20000;
  const SieveTables t = build_sieve(limit);
  for (std::uint32_t n = 1; n <= limit; ++n) {
    const int mu = oracle::mobius(n);
    REQUIRE(t.mu(n) == mu);
    REQUIRE(t.rad(n) == oracle::radical(n));
    REQUIRE(n % t.rad(n) == 0);
    REQUIRE(t.squarefree(t.rad(n)));
    REQUIRE((t.mu(n) != 0) == (t.rad(n) == n));
    if (n > 1) REQUIRE(t.spf(n) == oracle::factor(n).begin()->first);
  }
}

TEST_CASE("radical, phi and divisor count examples") {
  const SieveTables t = build_sieve(1000);
  CHECK(radical(1, t) == 1);
  CHECK(radical(8, t) == 2);
  CHECK(radical(360, t) == 30);
  CHECK(euler_phi(1, t) == 1);
  CHECK(euler_phi(6, t) == 2);
  CHECK(euler_phi(10, t) == 4);
  CHECK(divisor_count(1, t) == 1);
  CHECK(divisor_count(12, t) == 6);
  for (const std::uint32_t p : {2u, 3u, 97u, 997u}) CHECK(divisor_count(p, t) == 2);
  CHECK_THROWS_AS(euler_phi(1001, t), DomainError);
}

TEST_CASE("multiplicativity on random coprime pairs") {
  const SieveTables t = build_sieve(1000000);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint32_t> pick(1, 1000);
  int pairs = 0;
  while (pairs < 2000) {
    const std::uint32_t a = pick(rng);
    const std::uint32_t b = pick(rng);
    if (std::gcd(a, b) != 1) continue;
    ++pairs;
    const std::uint32_t ab = a * b;
    REQUIRE(t.mu(ab) == t.mu(a) * t.mu(b));
    REQUIRE(euler_phi(ab, t) == euler_phi(a, t) * euler_phi(b, t));
    REQUIRE(divisor_count(ab, t) == divisor_count(a, t) * divisor_count(b, t));
  }
}

TEST_CASE("phi and d against enumeration") {
  const SieveTables t = build_sieve(600);
  for (std::uint32_t n = 1; n <= 600; ++n) {
    REQUIRE(euler_phi(n, t) == oracle::totient(n));
    REQUIRE(divisor_count(n, t) == oracle::divisors(n).size());
  }
}

TEST_CASE("divisor_count_of_power") {
  const SieveTables t = build_sieve(100);
  CHECK(divisor_count_of_power(1, 5, t) == 1);
  CHECK(divisor_count_of_power(6, 1, t) == 4);
  CHECK(divisor_count_of_power(6, 2, t) == 9);
  CHECK(divisor_count_of_power(30, 3, t) == 64);
  CHECK_THROWS_AS(divisor_count_of_power(12, 1, t), DomainError);
}

TEST_CASE("sigma_of_radical_power examples and enumeration") {
  const SieveTables t = build_sieve(10000);
  CHECK(sigma_of_radical_power(1, 3, t) == 1);
  CHECK(sigma_of_radical_power(6, 2, t) == 12);
  CHECK(sigma_of_radical_power(2, 3, t) == 7);
  CHECK_THROWS_AS(sigma_of_radical_power(4, 2, t), DomainError);

  // direct divisor sums of qbar^(k-1) for small qbar; multiplicative structure for the rest
  for (std::uint32_t q = 1; q <= 60; ++q) {
    if (!t.squarefree(q)) continue;
    for (int k = 2; k <= 3; ++k) {
      BigInt power = 1;
      for (int i = 1; i < k; ++i) power *= q;
      REQUIRE(sigma_of_radical_power(q, k, t) == oracle::sigma(power));
    }
  }
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint32_t> pick(1, 100);
  for (int i = 0; i < 500; ++i) {
    const std::uint32_t a = pick(rng);
    const std::uint32_t b = pick(rng);
    if (std::gcd(a, b) != 1 || !t.squarefree(a) || !t.squarefree(b)) continue;
    REQUIRE(sigma_of_radical_power(a * b, 3, t) == sigma_of_radical_power(a, 3, t) * sigma_of_radical_power(b, 3, t));
  }
}

TEST_CASE("is_power_free examples") {
  const SieveTables t = build_sieve(100);
  CHECK_FALSE(is_power_free(8, 2, t));
  CHECK_FALSE(is_power_free(8, 3, t));
  CHECK(is_power_free(8, 4, t));
  CHECK(is_power_free(12, 3, t));
  CHECK_THROWS_AS(is_power_free(101, 2, t), DomainError);
}

TEST_CASE("two_param_totient examples") {
  const SieveTables t = build_sieve(1000);
  CHECK(two_param_totient(Rational(1, 11), 10, t) == 0);  // q x < 1
  CHECK(two_param_totient(Rational(1, 2), 10, t) == 2);
  for (std::uint32_t n = 1; n <= 200; ++n) CHECK(two_param_totient(Rational(1), n, t) == std::int64_t(euler_phi(n, t)));
  CHECK_THROWS_AS(two_param_totient(Rational(0), 10, t), DomainError);
  CHECK_THROWS_AS(two_param_totient(Rational(-1, 2), 10, t), DomainError);
  CHECK_THROWS_AS(two_param_totient(Rational(1, 2), 1001, t), DomainError);
}

TEST_CASE("two_param_totient equals enumeration for q <= 500") {
  const SieveTables t = build_sieve(500);
  const Rational xs[] = {Rational(1, 7), Rational(1, 3), Rational(1, 2), Rational(1), Rational(3, 2)};
  for (std::uint32_t q = 1; q <= 500; ++q) {
    for (const auto& x : xs) REQUIRE(two_param_totient(x, q, t) == oracle::phi2(x, q));
  }
}

TEST_CASE("squarefree_count") {
  CHECK(squarefree_count(1) == 1);
  CHECK(squarefree_count(10) == 7);
  CHECK(squarefree_count(100) == 61);
  // against a sieve count
  const SieveTables t = build_sieve(100000);
  std::uint64_t running = 0;
  for (std::uint32_t n = 1; n <= 100000; ++n) {
    running += t.squarefree(n) ? 1 : 0;
    if (n % 997 == 0 || n == 100000) REQUIRE(squarefree_count(n) == running);
  }
  for (const std::uint64_t s : {1000ull, 10000ull, 100000ull, 1000000ull}) {
    const double ratio = static_cast<double>(squarefree_count(s)) / static_cast<double>(s);
    CHECK(std::abs(ratio - 6.0 / (std::numbers::pi * std::numbers::pi)) <= 3.0 / std::sqrt(static_cast<double>(s)));
  }
}

TEST_CASE("zeta values") {
  const double pi = std::numbers::pi;
  const ZetaValue z2 = zeta(2, 1e-12);
  CHECK(std::abs(z2.value - pi * pi / 6) <= z2.error);
  CHECK(z2.error <= 1e-12 * z2.value);
  const ZetaValue z4 = zeta(4, 1e-12);
  CHECK(std::abs(z4.value - std::pow(pi, 4) / 90) <= z4.error);

  // partial sums to 10^7 bracket zeta(3) within [S, S + N^-2 / 2]
  double s = 0.0;
  for (int n = 10000000; n >= 1; --n) s += 1.0 / (static_cast<double>(n) * n * n);
  const ZetaValue z3 = zeta(3, 1e-12);
  CHECK(z3.upper() >= s - 1e-15);
  CHECK(z3.lower() <= s + 0.5e-14 + 1e-15);
  CHECK_THROWS_AS(zeta(1), DomainError);
}
