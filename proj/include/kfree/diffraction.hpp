#pragma once

#include <cstdint>
#include <vector>

#include "kfree/arith.hpp"
#include "kfree/rational.hpp"

namespace kfree {

// k together with a certified zeta(k).
struct KFreeParams {
  int k = 2;
  ZetaValue zeta_k;

  static KFreeParams make(int k);
};

// A diffraction peak z = m/q of V_k with its intensity (f_k(q)/zeta(k))^2.
struct SpectrumPoint {
  std::int64_t m = 0;
  std::uint32_t q = 1;
  Rational z;
  double intensity = 0.0;
};

// Partial sum of Z_k(x) over squarefree radicals qbar <= cutoff_qbar, with a
// bound on everything omitted: the true value lies in [value, value + tail_bound].
struct ZValue {
  Rational x;
  double value = 0.0;
  double tail_bound = 0.0;
  std::uint32_t cutoff_qbar = 1;
  // Set when cutoff_qbar lies below ceil(x^(-1/k)), i.e. no term was summed.
  bool flagged = false;
};

struct SupportListing {
  std::vector<SpectrumPoint> points;  // ascending in z
  // Least radical any omitted point can have, and the resulting bound
  // qbar_min^(-2k) on the intensity of every omitted point.
  std::uint32_t qbar_min = 1;
  double omitted_intensity_bound = 0.0;
};

// f_k(q) = prod_{p | rad q} 1/(p^k - 1) if q is (k+1)-free, else 0.
BigRational f_k(std::uint32_t q, const KFreeParams& params, const SieveTables& tables);

// f_k(q) = 1 / (phi(rad q) * sigma(rad(q)^(k-1))); q must be (k+1)-free.
BigRational f_k_divisor_form(std::uint32_t q, const KFreeParams& params, const SieveTables& tables);

// Double-precision f_k from the distinct primes of q (q assumed (k+1)-free).
double f_k_double(std::span<const PrimePower> factors, int k);

// I_k(m/q); m/q must be a support point (gcd(m, q) = 1, q (k+1)-free).
double intensity(std::int64_t m, std::uint32_t q, const KFreeParams& params, const SieveTables& tables);

// Support points z in (x_lo, x_hi] with denominator q <= q_max.
SupportListing enumerate_support(const KFreeParams& params, const Rational& x_lo, const Rational& x_hi,
                                 std::uint32_t q_max, const SieveTables& tables);

// Brute-force Z_k(x) truncated to q <= q_max, straight from the defining sum
// over (k+1)-free q >= 1/x. A nonzero radical_cap also drops every q with
// rad(q) > radical_cap, matching the truncation of the grouped evaluator.
double z_naive(const Rational& x, const KFreeParams& params, std::uint32_t q_max, const SieveTables& tables,
               std::uint32_t radical_cap = 0);
BigRational z_naive_exact(const Rational& x, const KFreeParams& params, std::uint32_t q_max,
                          const SieveTables& tables, std::uint32_t radical_cap = 0);

struct EvalOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
};

// Z_k(x) grouped by squarefree radical: sum over qbar with qbar^k >= 1/x and
// qbar <= qbar_max of f_k(qbar)^2 * sum_{l | qbar^(k-1)} phi(l x, qbar).
ZValue z_grouped(const Rational& x, const KFreeParams& params, std::uint32_t qbar_max, const SieveTables& tables,
                 const EvalOptions& options = {});

inline constexpr std::uint32_t kExactModeMaxQbar = 1000;

// Same grouped sum in exact rational arithmetic (qbar_max <= kExactModeMaxQbar).
BigRational z_grouped_exact(const Rational& x, const KFreeParams& params, std::uint32_t qbar_max,
                            const SieveTables& tables);

// Upper bound on the mass of Z_k(x) carried by radicals above qbar_max.
double tail_bound(std::uint32_t qbar_max, const Rational& x, const KFreeParams& params);

// Doubles the cutoff until tail_bound <= rel_tol * value.
ZValue z_adaptive(const Rational& x, const KFreeParams& params, double rel_tol, const SieveTables& tables,
                  const EvalOptions& options = {});

// ceil(x^(-1/k)): the least qbar with qbar^k >= 1/x.
std::uint64_t min_contributing_qbar(const Rational& x, int k);

}  // namespace kfree
