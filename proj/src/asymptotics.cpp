#include "kfree/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kfree/compensated.hpp"
#include "kfree/errors.hpp"

namespace kfree {

std::vector<Rational> log_grid(const Rational& x_min, const Rational& x_max, int points) {
  if (points < 2) throw DomainError("a scan needs at least 2 points");
  if (!x_min.positive() || !(x_min < x_max)) throw DomainError("need 0 < x_min < x_max");
  const double lo = std::log(x_min.to_double());
  const double hi = std::log(x_max.to_double());
  std::vector<Rational> grid;
  grid.reserve(points);
  grid.push_back(x_max);
  for (int i = 1; i + 1 < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    grid.push_back(Rational::from_double(std::exp(hi + t * (lo - hi))));
  }
  grid.push_back(x_min);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] < grid[i - 1])) throw DomainError("grid too dense to keep distinct dyadic points");
  }
  return grid;
}

ScanTable scan(int k, const Rational& x_min, const Rational& x_max, int points, double rel_tol,
               const SieveTables& tables, const EvalOptions& options) {
  if (Rational(1) < x_max) throw DomainError("scan needs x_max <= 1");
  const KFreeParams params = KFreeParams::make(k);
  ScanTable table;
  table.k = k;
  table.rel_tol = rel_tol;
  for (const Rational& x : log_grid(x_min, x_max, points)) {
    table.rows.push_back(z_adaptive(x, params, rel_tol, tables, options));
  }
  return table;
}

FitResult fit_loglog(std::span<const double> xs, std::span<const double> values, int k) {
  if (xs.size() != values.size()) throw DomainError("x and value columns differ in length");
  std::vector<double> lx;
  std::vector<double> lz;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (values[i] > 0.0 && xs[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      lz.push_back(std::log(values[i]));
    }
  }
  if (lx.size() < 2) throw DomainError("fit needs at least 2 rows with positive value");
  const auto n = static_cast<double>(lx.size());
  double mx = 0.0;
  double mz = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    mz += lz[i];
  }
  mx /= n;
  mz /= n;
  double sxx = 0.0;
  double sxz = 0.0;
  double szz = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxz += (lx[i] - mx) * (lz[i] - mz);
    szz += (lz[i] - mz) * (lz[i] - mz);
  }
  if (sxx == 0.0) throw DomainError("fit needs at least 2 distinct x values");
  FitResult fit;
  fit.points = lx.size();
  fit.slope = sxz / sxx;
  fit.intercept = mz - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = lz[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
  }
  fit.r_squared = szz == 0.0 ? 1.0 : std::clamp(1.0 - sse / szz, 0.0, 1.0);
  fit.expected_slope = 2.0 - 1.0 / k;
  return fit;
}

FitResult fit_loglog(const ScanTable& table) {
  std::vector<double> xs;
  std::vector<double> vs;
  for (const auto& row : table.rows) {
    xs.push_back(row.x.to_double());
    vs.push_back(row.value);
  }
  return fit_loglog(xs, vs, table.k);
}

FkBoundsReport verify_fk_bounds(int k, std::uint32_t q_max, const SieveTables& tables, const FkFunction& fk) {
  const KFreeParams params = KFreeParams::make(k);
  if (q_max > tables.limit()) throw CapacityError("q_max exceeds sieve limit");
  const FkFunction& eval = fk ? fk : FkFunction(f_k);
  FkBoundsReport report;
  report.k = k;
  report.q_max = q_max;
  const double zeta_lower = params.zeta_k.lower();
  for (std::uint32_t q = 1; q <= q_max; ++q) {
    if (!is_power_free(q, k + 1, tables)) continue;
    const BigRational f = eval(q, params, tables);
    if (q == 1) {
      report.q1_edge_reported = true;
      report.q1_value = f;
      continue;
    }
    ++report.checked;
    BigInt rk = 1;
    const std::uint32_t r = radical(q, tables);
    for (int i = 0; i < k; ++i) rk *= r;
    // rad(q)^k f_k(q) must lie strictly inside (1, zeta(k))
    const BigRational scaled = f * rk;
    const bool lower_ok = scaled > 1;
    const bool upper_ok = static_cast<double>(scaled) * (1.0 + 1e-12) < zeta_lower;
    if (!lower_ok || !upper_ok) report.violations.push_back(q);
  }
  return report;
}

std::vector<PhiSample> random_phi_samples(std::size_t count, std::uint32_t q_max, int k, const SieveTables& tables,
                                          std::uint64_t seed) {
  if (q_max < 1 || q_max > tables.limit()) throw CapacityError("q_max outside sieve range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick_q(1, q_max);
  std::uniform_int_distribution<std::int64_t> pick_den(1, 64);
  std::vector<PhiSample> samples;
  samples.reserve(count);
  while (samples.size() < count) {
    const std::uint32_t q = pick_q(rng);
    if (!is_power_free(q, k + 1, tables)) continue;
    const std::int64_t den = pick_den(rng);
    std::uniform_int_distribution<std::int64_t> pick_num(1, 3 * den);
    samples.push_back({Rational(pick_num(rng), den), q});
  }
  return samples;
}

PhiReport verify_phi_identity(std::span<const PhiSample> samples, int k, const SieveTables& tables) {
  PhiReport report;
  for (const auto& s : samples) {
    if (!is_power_free(s.q, k + 1, tables)) throw DomainError(std::to_string(s.q) + " is not (k+1)-free");
    const std::uint32_t qbar = radical(s.q, tables);
    const std::int64_t ell = s.q / qbar;
    ++report.checked;
    if (two_param_totient(s.x, s.q, tables) != two_param_totient(s.x * ell, qbar, tables)) {
      report.failures.push_back(s);
    }
  }
  return report;
}

PhiReport verify_phi_approx(std::uint32_t q_max, std::span<const Rational> x_grid, const SieveTables& tables) {
  if (q_max > tables.limit()) throw CapacityError("q_max exceeds sieve limit");
  PhiReport report;
  for (std::uint32_t q = 1; q <= q_max; ++q) {
    if (!tables.squarefree(q)) continue;
    const auto phi_q = static_cast<__int128>(euler_phi(q, tables));
    const auto d_q = static_cast<__int128>(divisor_count(q, tables));
    for (const Rational& x : x_grid) {
      ++report.checked;
      // |phi(x,q) den - num phi(q)| <= d(q) den
      const __int128 lhs = static_cast<__int128>(two_param_totient(x, q, tables)) * x.den() - phi_q * x.num();
      if ((lhs < 0 ? -lhs : lhs) > d_q * x.den()) report.failures.push_back({x, q});
    }
  }
  return report;
}

double MuTailReport::c_spread() const {
  if (rows.empty()) return 0.0;
  double lo = rows.front().c_estimate;
  double hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.c_estimate);
    hi = std::max(hi, r.c_estimate);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

MuTailReport verify_mu_tail(int k, std::span<const Rational> y_grid, double truncation_rel) {
  if (k < 2) throw DomainError("k must be >= 2");
  if (!(truncation_rel > 0.0 && truncation_rel < 1.0)) throw DomainError("truncation_rel must lie in (0, 1)");
  const double zeta2 = zeta(2, 1e-13).value;
  MuTailReport report;
  report.k = k;
  for (const Rational& y : y_grid) {
    if (!y.positive() || Rational(1) < y) throw DomainError("y must lie in (0, 1]");
    MuTailRow row;
    row.y = y;
    const double yd = y.to_double();
    row.main_term = std::pow(yd, k - 1) / ((k - 1) * zeta2);
    // least q with q >= 1/y
    const auto start = static_cast<std::uint64_t>((y.den() + y.num() - 1) / y.num());
    // T^(1-k)/(k-1) <= truncation_rel * main_term
    const double t_needed = std::pow((k - 1) * truncation_rel * row.main_term, -1.0 / (k - 1));
    const auto t = std::max<std::uint64_t>(start, static_cast<std::uint64_t>(std::ceil(t_needed)));
    if (t > (std::uint64_t{1} << 40)) throw CapacityError("mu tail truncation point too large");
    row.truncation = t;
    row.truncation_bound = std::pow(static_cast<double>(t), 1.0 - k) / (k - 1);

    // segmented sieve of squares over [start, t], summed from the top down
    std::vector<std::uint64_t> primes;
    {
      const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(t))) + 1;
      std::vector<bool> composite(root + 1, false);
      for (std::uint64_t p = 2; p <= root; ++p) {
        if (composite[p]) continue;
        if (p * p <= t) primes.push_back(p);
        for (std::uint64_t m = p * p; m <= root; m += p) composite[m] = true;
      }
    }
    constexpr std::uint64_t kSegment = 1u << 20;
    std::vector<char> squarefree(kSegment);
    KahanAccumulator<double> acc;
    for (std::uint64_t hi = t;;) {
      const std::uint64_t lo = hi - start + 1 > kSegment ? hi - kSegment + 1 : start;
      std::fill(squarefree.begin(), squarefree.end(), 1);
      for (const std::uint64_t p : primes) {
        const std::uint64_t p2 = p * p;
        if (p2 > hi) break;
        for (std::uint64_t m = (lo + p2 - 1) / p2 * p2; m <= hi; m += p2) squarefree[m - lo] = 0;
      }
      KahanAccumulator<double> segment;
      for (std::uint64_t q = hi;; --q) {
        if (squarefree[q - lo]) {
          const double inv = 1.0 / static_cast<double>(q);
          double term = inv;
          for (int i = 1; i < k; ++i) term *= inv;
          segment += term;
        }
        if (q == lo) break;
      }
      acc += segment;
      if (lo == start) break;
      hi = lo - 1;
    }
    row.partial_sum = acc.value();
    row.ratio = row.partial_sum / row.main_term;
    row.ratio_uncertainty = row.truncation_bound / row.main_term;
    row.c_estimate = std::abs(row.ratio - 1.0) / std::sqrt(yd);
    report.rows.push_back(row);
  }
  return report;
}

DivisorBoundReport divisor_bound_threshold(int k, double eps, std::uint32_t q_max, const SieveTables& tables) {
  if (k < 2) throw DomainError("k must be >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (q_max > tables.limit()) throw CapacityError("q_max exceeds sieve limit");
  DivisorBoundReport report;
  report.k = k;
  report.eps = eps;
  report.q_max = q_max;
  const double log_2k = std::log(2.0 * k);
  for (std::uint32_t q = 1; q <= q_max; ++q) {
    if (!tables.squarefree(q)) continue;
    // d(q) d(q^(k-1)) = (2k)^omega(q) for squarefree q
    const auto omega = factorize(q, tables).size;
    if (static_cast<double>(omega) * log_2k > eps * std::log(static_cast<double>(q))) {
      ++report.violation_count;
      report.largest_violation = q;
    }
  }
  return report;
}

}  // namespace kfree
