#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "kfree/arith.hpp"
#include "kfree/diffraction.hpp"
#include "kfree/rational.hpp"

namespace kfree {

// Sampled graph of Z_k on a log grid, rows by descending x.
struct ScanTable {
  int k = 2;
  double rel_tol = 1e-2;
  std::vector<ZValue> rows;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double max_residual = 0.0;
  double expected_slope = 0.0;  // 2 - 1/k
  std::size_t points = 0;

  double gap() const { return slope > expected_slope ? slope - expected_slope : expected_slope - slope; }
};

// Log-spaced grid from x_max down to x_min; endpoints exact, interior points
// dyadic approximations of the geometric spacing.
std::vector<Rational> log_grid(const Rational& x_min, const Rational& x_max, int points);

ScanTable scan(int k, const Rational& x_min, const Rational& x_max, int points, double rel_tol,
               const SieveTables& tables, const EvalOptions& options = {});

// Least squares of log(value) on log(x) over rows with positive value.
FitResult fit_loglog(const ScanTable& table);
FitResult fit_loglog(std::span<const double> xs, std::span<const double> values, int k);

using FkFunction = std::function<BigRational(std::uint32_t, const KFreeParams&, const SieveTables&)>;

struct FkBoundsReport {
  int k = 2;
  std::uint32_t q_max = 0;
  std::uint64_t checked = 0;
  std::vector<std::uint32_t> violations;
  // q = 1 sits outside the strict bounds: f_k(1) = 1 equals the lower expression.
  bool q1_edge_reported = false;
  BigRational q1_value;

  bool ok() const { return violations.empty(); }
};

// Checks 1/rad(q)^k < f_k(q) < zeta(k)/rad(q)^k for (k+1)-free 1 < q <= q_max.
// `fk` defaults to f_k; tests inject a tampered one.
FkBoundsReport verify_fk_bounds(int k, std::uint32_t q_max, const SieveTables& tables, const FkFunction& fk = {});

struct PhiSample {
  Rational x;
  std::uint32_t q = 1;
};

struct PhiReport {
  std::uint64_t checked = 0;
  std::vector<PhiSample> failures;

  bool ok() const { return failures.empty(); }
};

// Random (x, q) with q <= q_max (k+1)-free and x = a/b, b <= 64, a <= 3b.
std::vector<PhiSample> random_phi_samples(std::size_t count, std::uint32_t q_max, int k, const SieveTables& tables,
                                          std::uint64_t seed = 20190709);

// phi(x, q) == phi(l x, rad q) with l = q / rad q, for each sample.
PhiReport verify_phi_identity(std::span<const PhiSample> samples, int k, const SieveTables& tables);

// |phi(x, q) - x phi(q)| <= d(q) for squarefree q <= q_max and every grid x.
PhiReport verify_phi_approx(std::uint32_t q_max, std::span<const Rational> x_grid, const SieveTables& tables);

struct MuTailRow {
  Rational y;
  double partial_sum = 0.0;   // sum_{1/y <= q <= T} |mu(q)| / q^k
  std::uint64_t truncation = 0;  // T
  double truncation_bound = 0.0;  // T^(1-k)/(k-1) bounds the omitted part
  double main_term = 0.0;     // y^(k-1) / ((k-1) zeta(2))
  double ratio = 0.0;
  double ratio_uncertainty = 0.0;
  double c_estimate = 0.0;    // |ratio - 1| / sqrt(y)
};

struct MuTailReport {
  int k = 2;
  std::vector<MuTailRow> rows;

  // max / min of the c estimates across rows
  double c_spread() const;
};

MuTailReport verify_mu_tail(int k, std::span<const Rational> y_grid, double truncation_rel = 1e-5);

struct DivisorBoundReport {
  int k = 2;
  double eps = 0.5;
  std::uint32_t q_max = 0;
  std::uint64_t violation_count = 0;
  std::optional<std::uint32_t> largest_violation;
};

// Squarefree q <= q_max with d(q) d(q^(k-1)) > q^eps.
DivisorBoundReport divisor_bound_threshold(int k, double eps, std::uint32_t q_max, const SieveTables& tables);

}  // namespace kfree
