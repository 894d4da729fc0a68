#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kfree/diffraction.hpp"
#include "kfree/directspace.hpp"
#include "kfree/errors.hpp"
#include "oracles.hpp"

using namespace kfree;

TEST_CASE("generate_patch examples") {
  const Patch p2 = generate_patch(2, 10);
  CHECK(p2.count() == 7);  // 1 2 3 5 6 7 10
  CHECK(density(p2) == doctest::Approx(0.7));
  CHECK_FALSE(p2.contains(4));
  CHECK_FALSE(p2.contains(8));
  CHECK_FALSE(p2.contains(9));
  CHECK(p2.contains(10));
  CHECK_FALSE(p2.contains(0));
  CHECK_FALSE(p2.contains(11));

  CHECK(generate_patch(3, 10).count() == 9);
  CHECK(generate_patch(2, 3).count() == 3);
  CHECK(generate_patch(4, 15).count() == 15);
  CHECK_THROWS_AS(generate_patch(1, 10), DomainError);
  CHECK_THROWS_AS(generate_patch(2, 1000000, 16), CapacityError);
}

TEST_CASE("patch membership matches trial division") {
  for (int k = 2; k <= 4; ++k) {
    const Patch p = generate_patch(k, 5000);
    std::uint64_t count = 0;
    for (std::uint64_t n = 1; n <= 5000; ++n) {
      REQUIRE(p.contains(n) == oracle::power_free(n, k));
      count += p.contains(n) ? 1 : 0;
    }
    CHECK(p.count() == count);
  }
}

TEST_CASE("pair frequencies") {
  const Patch p = generate_patch(2, 10);
  const PairFrequencies f = pair_frequencies(p, 3);
  REQUIRE(f.eta.size() == 4);
  CHECK(f.eta[0] == doctest::Approx(0.7));
  CHECK(f.eta[1] == doctest::Approx(0.4));  // (1,2) (2,3) (5,6) (6,7)
  CHECK_THROWS_AS(pair_frequencies(p, 10), DomainError);

  const Patch big = generate_patch(3, 20000);
  const PairFrequencies g = pair_frequencies(big, 200);
  for (std::uint64_t m = 0; m <= 200; ++m) {
    std::uint64_t brute = 0;
    for (std::uint64_t n = 1; n + m <= 20000; ++n) brute += (big.contains(n) && big.contains(n + m)) ? 1 : 0;
    REQUIRE(g.eta[m] == doctest::Approx(static_cast<double>(brute) / 20000.0).epsilon(1e-15));
    REQUIRE(g.eta[m] <= g.eta[0]);
  }
}

TEST_CASE("empirical intensity at z = 0 is the squared density") {
  for (const std::uint64_t n : {10ull, 1000ull, 99991ull}) {
    const Patch p = generate_patch(2, n);
    const double d = density(p);
    CHECK(empirical_intensity(p, Rational(0)) == d * d);
    CHECK(empirical_intensity(p, 0.0) == doctest::Approx(d * d).epsilon(1e-12));
  }
}

TEST_CASE("empirical intensity approaches the closed form") {
  const SieveTables t = build_sieve(100);
  const KFreeParams params = KFreeParams::make(2);
  const Patch p = generate_patch(2, 100000);
  const double closed = intensity(1, 4, params, t);
  CHECK(std::abs(empirical_intensity(p, Rational(1, 4)) - closed) <= 0.01);
  CHECK(std::abs(empirical_intensity(p, Rational(3, 4)) - closed) <= 0.01);
  CHECK(std::abs(empirical_intensity(p, Rational(1, 3)) - intensity(1, 3, params, t)) <= 0.01);
  CHECK(empirical_intensity(p, 0.25) == doctest::Approx(empirical_intensity(p, Rational(1, 4))).epsilon(1e-9));
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  CHECK(empirical_intensity(p, golden) < 1e-2);
  CHECK(empirical_intensity(p, std::numbers::sqrt2 - 1.0) < 1e-2);
}

TEST_CASE("empirical intensity symmetries") {
  const Patch p = generate_patch(2, 30000);
  const double bound = 5.0 / std::sqrt(30000.0);
  CHECK(empirical_intensity(p, Rational(6, 5)) == empirical_intensity(p, Rational(1, 5)));
  CHECK(empirical_intensity(p, Rational(-1, 5)) == doctest::Approx(empirical_intensity(p, Rational(1, 5))).epsilon(1e-12));
  CHECK(std::abs(empirical_intensity(p, Rational(1, 9)) - empirical_intensity(p, Rational(4, 9))) <= bound);
  CHECK(std::abs(empirical_intensity(p, 0.3 + 1.0) - empirical_intensity(p, 0.3)) <= 1e-9);
}

TEST_CASE("density of cube-free integers") {
  const Patch p = generate_patch(3, 1000000);
  const ZetaValue z3 = zeta(3);
  CHECK(std::abs(density(p) - 1.0 / z3.value) < 1e-3);
}

TEST_CASE("large q takes the direct modular path") {
  const Patch p = generate_patch(2, 50000);
  const Rational z(1, 2000003);
  const double direct = empirical_intensity(p, z);
  CHECK(direct == doctest::Approx(empirical_intensity(p, z.to_double())).epsilon(1e-6));
}
