#include "kfree/directspace.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "kfree/compensated.hpp"
#include "kfree/errors.hpp"

namespace kfree {

namespace {

// Beyond this denominator the residue-class table is larger than it is useful.
constexpr std::uint64_t kMaxTableDenominator = std::uint64_t{1} << 20;

struct ComplexSum {
  KahanAccumulator<double> re;
  KahanAccumulator<double> im;

  void add(double weight, double turns) {
    const double angle = -2.0 * std::numbers::pi * turns;
    re += weight * std::cos(angle);
    im += weight * std::sin(angle);
  }

  double norm2(double n) const {
    const double r = re.value() / n;
    const double i = im.value() / n;
    return r * r + i * i;
  }
};

std::vector<std::uint64_t> small_primes(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

}  // namespace

Patch generate_patch(int k, std::uint64_t n, std::size_t memory_ceiling) {
  if (k < 2) throw DomainError("k must be >= 2");
  if (n < 1) throw DomainError("patch size must be >= 1");
  const std::uint64_t words = (n + 63) / 64;
  if (words * sizeof(std::uint64_t) > memory_ceiling) {
    throw CapacityError("patch of size " + std::to_string(n) + " exceeds memory ceiling");
  }
  Patch patch;
  patch.k_ = k;
  patch.n_ = n;
  patch.words_.assign(words, ~std::uint64_t{0});
  if (n % 64 != 0) patch.words_.back() = (std::uint64_t{1} << (n % 64)) - 1;

  auto root = static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 1.0 / k)) + 1;
  for (const std::uint64_t p : small_primes(root)) {
    std::uint64_t pk = 1;
    bool fits = true;
    for (int i = 0; i < k && fits; ++i) {
      if (__builtin_mul_overflow(pk, p, &pk) || pk > n) fits = false;
    }
    if (!fits) continue;
    for (std::uint64_t m = pk; m <= n; m += pk) patch.words_[(m - 1) >> 6] &= ~(std::uint64_t{1} << ((m - 1) & 63));
  }
  for (const auto w : patch.words_) patch.count_ += std::popcount(w);
  return patch;
}

double density(const Patch& patch) {
  return static_cast<double>(patch.count()) / static_cast<double>(patch.size());
}

PairFrequencies pair_frequencies(const Patch& patch, std::uint64_t m_max) {
  if (m_max >= patch.size()) throw DomainError("m_max must be below the patch size");
  const auto& w = patch.words();
  const std::size_t nw = w.size();
  PairFrequencies out;
  out.m_max = m_max;
  out.eta.resize(m_max + 1);
  for (std::uint64_t m = 0; m <= m_max; ++m) {
    // count n with bit n-1 and bit n-1+m both set; shifted word reads bits [64i+m, 64i+m+63]
    const std::size_t ws = m >> 6;
    const unsigned bs = m & 63;
    std::uint64_t pairs = 0;
    for (std::size_t i = 0; i + ws < nw; ++i) {
      std::uint64_t shifted = w[i + ws] >> bs;
      if (bs != 0 && i + ws + 1 < nw) shifted |= w[i + ws + 1] << (64 - bs);
      pairs += std::popcount(w[i] & shifted);
    }
    out.eta[m] = static_cast<double>(pairs) / static_cast<double>(patch.size());
  }
  return out;
}

double empirical_intensity(const Patch& patch, const Rational& z) {
  const auto q = static_cast<std::uint64_t>(z.den());
  // m reduced into [0, q): z and z + 1 produce the same residues
  const auto m = static_cast<std::uint64_t>(((z.num() % z.den()) + z.den()) % z.den());
  const auto n_total = static_cast<double>(patch.size());
  ComplexSum sum;
  if (q <= kMaxTableDenominator && q <= patch.size()) {
    std::vector<std::uint64_t> residue_count(q, 0);
    for (std::uint64_t n = 1; n <= patch.size(); ++n) {
      if (patch.contains(n)) ++residue_count[n % q];
    }
    for (std::uint64_t r = 0; r < q; ++r) {
      if (residue_count[r] == 0) continue;
      const auto phase = static_cast<std::uint64_t>((static_cast<unsigned __int128>(m) * r) % q);
      sum.add(static_cast<double>(residue_count[r]), static_cast<double>(phase) / static_cast<double>(q));
    }
  } else {
    for (std::uint64_t n = 1; n <= patch.size(); ++n) {
      if (!patch.contains(n)) continue;
      const auto phase = static_cast<std::uint64_t>((static_cast<unsigned __int128>(m) * n) % q);
      sum.add(1.0, static_cast<double>(static_cast<long double>(phase) / static_cast<long double>(q)));
    }
  }
  return sum.norm2(n_total);
}

double empirical_intensity(const Patch& patch, double z) {
  if (!std::isfinite(z)) throw DomainError("frequency must be finite");
  const auto n_total = static_cast<double>(patch.size());
  const double frac_z = z - std::floor(z);
  ComplexSum sum;
  for (std::uint64_t n = 1; n <= patch.size(); ++n) {
    if (!patch.contains(n)) continue;
    const double t = frac_z * static_cast<double>(n);
    sum.add(1.0, t - std::floor(t));
  }
  return sum.norm2(n_total);
}

}  // namespace kfree
