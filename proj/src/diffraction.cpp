#include "kfree/diffraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kfree/compensated.hpp"
#include "kfree/errors.hpp"
#include "kfree/parallel.hpp"

namespace kfree {

namespace {

constexpr std::uint32_t kChunk = 8192;
constexpr std::size_t kMaxSupportPoints = std::size_t{50'000'000};
// Abort divisor walks beyond this many distinct primes (k^omega divisors).
constexpr std::size_t kMaxOmega = 20;

using i128 = __int128;

void require_k(int k) {
  if (k < 2) throw DomainError("k must be >= 2, got " + std::to_string(k));
}

void require_in_tables(std::uint64_t q, const SieveTables& tables, const char* what) {
  if (q < 1 || q > tables.limit()) {
    throw CapacityError(std::string(what) + "=" + std::to_string(q) + " exceeds sieve limit " +
                        std::to_string(tables.limit()));
  }
}

bool power_free(const Factorization& f, int j) {
  for (const auto& [p, e] : f.view()) {
    if (e >= static_cast<std::uint32_t>(j)) return false;
  }
  return true;
}

BigInt big_pow(std::uint64_t p, int k) {
  BigInt r = 1;
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

struct RadicalPrimes {
  std::array<std::uint32_t, Factorization::kMaxPrimes> p{};
  std::size_t size = 0;

  std::span<const std::uint32_t> view() const { return {p.data(), size}; }
};

// Visits l * qbar for every divisor l of qbar^(k-1). Each prime of qbar
// carries an exponent 0..k-1 in l; the products are formed incrementally.
template <typename Visit>
void for_each_scaled_divisor(const RadicalPrimes& primes, std::uint64_t qbar, int k, Visit&& visit) {
  if (primes.size > kMaxOmega) throw CapacityError("radical " + std::to_string(qbar) + " has too many prime factors");
  std::array<std::uint64_t, Factorization::kMaxPrimes + 1> partial{};
  std::array<int, Factorization::kMaxPrimes> exponent{};
  const std::size_t w = primes.size;
  partial[0] = qbar;
  for (std::size_t i = 0; i < w; ++i) partial[i + 1] = partial[i];
  for (;;) {
    visit(partial[w]);
    // odometer increment from the last position
    std::size_t pos = w;
    while (pos > 0) {
      const std::size_t i = pos - 1;
      if (exponent[i] + 1 < k) {
        ++exponent[i];
        std::uint64_t next = 0;
        if (__builtin_mul_overflow(partial[i + 1], std::uint64_t{primes.p[i]}, &next) ||
            next > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
          throw CapacityError("qbar^k exceeds 63 bits for qbar=" + std::to_string(qbar));
        }
        partial[i + 1] = next;
        for (std::size_t j = i + 1; j < w; ++j) {
          exponent[j] = 0;
          partial[j + 1] = partial[i + 1];
        }
        break;
      }
      --pos;
    }
    if (pos == 0) return;
  }
}

// sum_{l | qbar^(k-1)} phi(l x, qbar); each phi is a coprime count up to
// floor(l * qbar * x).
i128 inner_totient_sum(const Rational& x, const RadicalPrimes& primes, std::uint64_t qbar, int k) {
  i128 total = 0;
  for_each_scaled_divisor(primes, qbar, k, [&](std::uint64_t lq) {
    const std::int64_t n = x.floor_mul_div(lq);
    if (n >= 1) total += count_coprime_up_to(n, primes.view());
  });
  return total;
}

RadicalPrimes radical_primes(std::uint32_t qbar, const SieveTables& tables) {
  RadicalPrimes r;
  while (qbar > 1) {
    const std::uint32_t p = tables.spf_unchecked(qbar);
    r.p[r.size++] = p;
    qbar /= p;
  }
  return r;
}

double f_k_from_primes(const RadicalPrimes& primes, int k) {
  double f = 1.0;
  for (std::size_t i = 0; i < primes.size; ++i) f /= std::pow(static_cast<double>(primes.p[i]), k) - 1.0;
  return f;
}

// Compensated sum of the grouped terms over qbar in (lo, hi], in aligned
// chunks combined in ascending order.
KahanAccumulator<double> grouped_partial(const Rational& x, int k, std::uint64_t first, std::uint32_t lo,
                                         std::uint32_t hi, const SieveTables& tables, unsigned threads) {
  KahanAccumulator<double> total;
  const std::uint64_t start = std::max<std::uint64_t>(first, std::uint64_t{lo} + 1);
  if (start > hi) return total;
  const std::uint64_t c0 = (start - 1) / kChunk;
  const std::uint64_t c1 = (std::uint64_t{hi} - 1) / kChunk;
  const std::size_t count = c1 - c0 + 1;
  std::vector<KahanAccumulator<double>> slots(count);
  parallel_for_index(count, threads, [&](std::size_t i) {
    const std::uint64_t c = c0 + i;
    const std::uint64_t a = std::max<std::uint64_t>(start, c * kChunk + 1);
    const std::uint64_t b = std::min<std::uint64_t>(hi, (c + 1) * kChunk);
    KahanAccumulator<double> acc;
    for (std::uint64_t q = a; q <= b; ++q) {
      const auto qbar = static_cast<std::uint32_t>(q);
      if (tables.mu_unchecked(qbar) == 0) continue;
      const RadicalPrimes primes = radical_primes(qbar, tables);
      const i128 phis = inner_totient_sum(x, primes, qbar, k);
      if (phis == 0) continue;
      const double f = f_k_from_primes(primes, k);
      acc += f * f * static_cast<double>(phis);
    }
    slots[i] = acc;
  });
  for (const auto& s : slots) total += s;
  return total;
}

}  // namespace

KFreeParams KFreeParams::make(int k) {
  require_k(k);
  return KFreeParams{k, zeta(k, 1e-13)};
}

std::uint64_t min_contributing_qbar(const Rational& x, int k) {
  require_k(k);
  if (!x.positive()) throw DomainError("x must be positive");
  // least Q with Q^k * num >= den
  const BigInt num = x.num();
  const BigInt den = x.den();
  auto ok = [&](std::uint64_t q) { return big_pow(q, k) * num >= den; };
  auto guess = static_cast<std::uint64_t>(std::floor(std::pow(1.0 / x.to_double(), 1.0 / k)));
  if (guess < 1) guess = 1;
  while (guess > 1 && ok(guess - 1)) --guess;
  while (!ok(guess)) ++guess;
  return guess;
}

BigRational f_k(std::uint32_t q, const KFreeParams& params, const SieveTables& tables) {
  require_k(params.k);
  const auto f = factorize(q, tables);
  if (!power_free(f, params.k + 1)) return BigRational(0);
  BigInt den = 1;
  for (const auto& [p, e] : f.view()) den *= big_pow(p, params.k) - 1;
  return BigRational(BigInt(1), den);
}

BigRational f_k_divisor_form(std::uint32_t q, const KFreeParams& params, const SieveTables& tables) {
  require_k(params.k);
  if (!is_power_free(q, params.k + 1, tables)) {
    throw DomainError(std::to_string(q) + " is not " + std::to_string(params.k + 1) + "-free");
  }
  const std::uint32_t r = radical(q, tables);
  return BigRational(BigInt(1), BigInt(euler_phi(r, tables)) * sigma_of_radical_power(r, params.k, tables));
}

double f_k_double(std::span<const PrimePower> factors, int k) {
  double f = 1.0;
  for (const auto& [p, e] : factors) f /= std::pow(static_cast<double>(p), k) - 1.0;
  return f;
}

double intensity(std::int64_t m, std::uint32_t q, const KFreeParams& params, const SieveTables& tables) {
  require_k(params.k);
  const auto f = factorize(q, tables);
  const auto am = static_cast<std::uint64_t>(m < 0 ? -m : m);
  if (std::gcd(am, std::uint64_t{q}) != 1) {
    throw DomainError(std::to_string(m) + "/" + std::to_string(q) + " is not in lowest terms");
  }
  if (!power_free(f, params.k + 1)) {
    throw DomainError("denominator " + std::to_string(q) + " is not " + std::to_string(params.k + 1) + "-free");
  }
  const double r = f_k_double(f.view(), params.k) / params.zeta_k.value;
  return r * r;
}

SupportListing enumerate_support(const KFreeParams& params, const Rational& x_lo, const Rational& x_hi,
                                 std::uint32_t q_max, const SieveTables& tables) {
  require_k(params.k);
  if (x_lo.num() < 0) throw DomainError("window start must be >= 0");
  if (!(x_lo < x_hi)) throw DomainError("empty window: need x_lo < x_hi");
  require_in_tables(q_max, tables, "q_max");

  SupportListing out;
  for (std::uint32_t q = 1; q <= q_max; ++q) {
    const auto f = factorize(q, tables);
    if (!power_free(f, params.k + 1)) continue;
    const std::int64_t m_lo = x_lo.floor_mul_div(q) + 1;
    const std::int64_t m_hi = x_hi.floor_mul_div(q);
    if (m_lo > m_hi) continue;
    const double r = f_k_double(f.view(), params.k) / params.zeta_k.value;
    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
      if (std::gcd(static_cast<std::uint64_t>(m < 0 ? -m : m), std::uint64_t{q}) != 1) continue;
      if (out.points.size() >= kMaxSupportPoints) throw CapacityError("support window holds too many points");
      out.points.push_back({m, q, Rational(m, q), r * r});
    }
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const SpectrumPoint& a, const SpectrumPoint& b) { return a.z < b.z; });

  // An omitted point has q > q_max and (k+1)-free q <= rad(q)^k.
  std::uint64_t qbar_min = 1;
  {
    const BigInt bound = q_max;
    while (big_pow(qbar_min, params.k) <= bound) ++qbar_min;
  }
  out.qbar_min = static_cast<std::uint32_t>(qbar_min);
  out.omitted_intensity_bound = std::pow(static_cast<double>(qbar_min), -2.0 * params.k);
  return out;
}

double z_naive(const Rational& x, const KFreeParams& params, std::uint32_t q_max, const SieveTables& tables,
               std::uint32_t radical_cap) {
  require_k(params.k);
  if (!x.positive()) throw DomainError("x must be positive");
  require_in_tables(q_max, tables, "q_max");
  // q >= 1/x  <=>  q * num >= den
  const std::uint64_t q_first = static_cast<std::uint64_t>((x.den() + x.num() - 1) / x.num());
  KahanAccumulator<double> acc;
  for (std::uint64_t q = std::max<std::uint64_t>(q_first, 1); q <= q_max; ++q) {
    const auto qq = static_cast<std::uint32_t>(q);
    const auto f = factorize(qq, tables);
    if (!power_free(f, params.k + 1)) continue;
    if (radical_cap != 0 && tables.rad(qq) > radical_cap) continue;
    const std::int64_t phi = two_param_totient(x, qq, tables);
    if (phi == 0) continue;
    const double fk = f_k_double(f.view(), params.k);
    acc += fk * fk * static_cast<double>(phi);
  }
  return acc.value();
}

BigRational z_naive_exact(const Rational& x, const KFreeParams& params, std::uint32_t q_max,
                          const SieveTables& tables, std::uint32_t radical_cap) {
  require_k(params.k);
  if (!x.positive()) throw DomainError("x must be positive");
  require_in_tables(q_max, tables, "q_max");
  const std::uint64_t q_first = static_cast<std::uint64_t>((x.den() + x.num() - 1) / x.num());
  BigRational acc = 0;
  for (std::uint64_t q = std::max<std::uint64_t>(q_first, 1); q <= q_max; ++q) {
    const auto qq = static_cast<std::uint32_t>(q);
    if (radical_cap != 0 && tables.rad(qq) > radical_cap) continue;
    const BigRational fk = f_k(qq, params, tables);
    if (fk == 0) continue;
    const std::int64_t phi = two_param_totient(x, qq, tables);
    if (phi != 0) acc += fk * fk * phi;
  }
  return acc;
}

double tail_bound(std::uint32_t qbar_max, const Rational& x, const KFreeParams& params) {
  require_k(params.k);
  if (qbar_max < 1) throw DomainError("qbar_max must be >= 1");
  // sum_{qbar > Q} [x zeta/qbar^k + 4 zeta^2/qbar^(3k/2)], each by its integral from Q.
  const double k = params.k;
  const double z = params.zeta_k.upper();
  const double q = qbar_max;
  const double linear = x.to_double() * z / ((k - 1.0) * std::pow(q, k - 1.0));
  const double s = 1.5 * k;
  const double divisor_part = 4.0 * z * z / ((s - 1.0) * std::pow(q, s - 1.0));
  // slack for rounding in the three pow/div evaluations above
  return (linear + divisor_part) * (1.0 + 1e-12);
}

ZValue z_grouped(const Rational& x, const KFreeParams& params, std::uint32_t qbar_max, const SieveTables& tables,
                 const EvalOptions& options) {
  require_k(params.k);
  if (!x.positive()) throw DomainError("x must be positive");
  require_in_tables(qbar_max, tables, "qbar_max");
  const std::uint64_t first = min_contributing_qbar(x, params.k);
  ZValue out;
  out.x = x;
  out.cutoff_qbar = qbar_max;
  out.tail_bound = tail_bound(qbar_max, x, params);
  if (first > qbar_max) {
    out.flagged = true;
    return out;
  }
  out.value = grouped_partial(x, params.k, first, 0, qbar_max, tables, options.threads).value();
  return out;
}

BigRational z_grouped_exact(const Rational& x, const KFreeParams& params, std::uint32_t qbar_max,
                            const SieveTables& tables) {
  require_k(params.k);
  if (!x.positive()) throw DomainError("x must be positive");
  if (qbar_max > kExactModeMaxQbar) {
    throw CapacityError("exact mode is limited to qbar <= " + std::to_string(kExactModeMaxQbar));
  }
  require_in_tables(qbar_max, tables, "qbar_max");
  BigRational acc = 0;
  const std::uint64_t first = min_contributing_qbar(x, params.k);
  for (std::uint64_t q = first; q <= qbar_max; ++q) {
    const auto qbar = static_cast<std::uint32_t>(q);
    if (!tables.squarefree(qbar)) continue;
    const RadicalPrimes primes = radical_primes(qbar, tables);
    const i128 phis = inner_totient_sum(x, primes, qbar, params.k);
    if (phis == 0) continue;
    const BigRational fk = f_k(qbar, params, tables);
    acc += fk * fk * static_cast<std::int64_t>(phis);
  }
  return acc;
}

ZValue z_adaptive(const Rational& x, const KFreeParams& params, double rel_tol, const SieveTables& tables,
                  const EvalOptions& options) {
  require_k(params.k);
  if (!x.positive()) throw DomainError("x must be positive");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("rel_tol must lie in (0, 1)");
  const std::uint64_t first = min_contributing_qbar(x, params.k);
  std::uint64_t cutoff = std::max<std::uint64_t>(first, 16);
  if (cutoff > tables.limit()) {
    throw CapacityError("x=" + x.str() + " needs qbar >= " + std::to_string(cutoff) + " beyond sieve limit " +
                        std::to_string(tables.limit()));
  }
  KahanAccumulator<double> acc =
      grouped_partial(x, params.k, first, 0, static_cast<std::uint32_t>(cutoff), tables, options.threads);
  for (;;) {
    const double tail = tail_bound(static_cast<std::uint32_t>(cutoff), x, params);
    if (tail <= rel_tol * acc.value()) {
      return ZValue{x, acc.value(), tail, static_cast<std::uint32_t>(cutoff), false};
    }
    if (cutoff >= tables.limit()) {
      throw CapacityError("x=" + x.str() + " needs qbar beyond sieve limit " + std::to_string(tables.limit()) +
                          " to reach rel_tol");
    }
    const std::uint64_t next = std::min<std::uint64_t>(cutoff * 2, tables.limit());
    acc += grouped_partial(x, params.k, first, static_cast<std::uint32_t>(cutoff), static_cast<std::uint32_t>(next),
                           tables, options.threads);
    cutoff = next;
  }
}

}  // namespace kfree
