#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kfree/arith.hpp"
#include "kfree/rational.hpp"

namespace kfree {

// V_k intersected with [1, N], stored as a bitset (bit n-1 <-> integer n).
// By the reflection symmetry of V_k, limits over [1, N] match those over
// the symmetric windows [-N, N].
class Patch {
 public:
  int k() const { return k_; }
  std::uint64_t size() const { return n_; }
  std::uint64_t count() const { return count_; }

  bool contains(std::uint64_t n) const {
    return n >= 1 && n <= n_ && ((words_[(n - 1) >> 6] >> ((n - 1) & 63)) & 1u);
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  friend Patch generate_patch(int, std::uint64_t, std::size_t);
  int k_ = 2;
  std::uint64_t n_ = 0;
  std::uint64_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

struct PairFrequencies {
  std::uint64_t m_max = 0;
  std::vector<double> eta;  // eta[m] for m in [0, m_max]
};

// Marks the k-free integers in [1, N] by striking multiples of p^k.
Patch generate_patch(int k, std::uint64_t n, std::size_t memory_ceiling = kDefaultMemoryCeiling);

double density(const Patch& patch);

// eta[m] = #{n : n, n+m in patch} / N.
PairFrequencies pair_frequencies(const Patch& patch, std::uint64_t m_max);

// |(1/N) sum_{n in patch} exp(-2 pi i z n)|^2. Rational z reduces m*n mod q
// exactly before taking the phase; a double z is range-reduced per term.
double empirical_intensity(const Patch& patch, const Rational& z);
double empirical_intensity(const Patch& patch, double z);

}  // namespace kfree
