// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "kfree/asymptotics.hpp"
#include "kfree/cli.hpp"
#include "kfree/diffraction.hpp"
#include "kfree/directspace.hpp"
#include "kfree/io.hpp"

using namespace kfree;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] %d %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return io::format_double(v); }

void oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const SieveTables tables = build_sieve(20736);
  bool pass = true;
  double worst = 0.0;
  for (int k = 2; k <= 3; ++k) {
    const KFreeParams params = KFreeParams::make(k);
    const std::uint32_t q_max = k == 2 ? 144 : 1728;
    for (const Rational x : {Rational(1, 3), Rational(1, 5), Rational(1, 20)}) {
      const BigRational grouped = z_grouped_exact(x, params, 12, tables);
      // the naive sum restricted to the same radicals (rad q <= 12)
      const BigRational naive = z_naive_exact(x, params, q_max, tables, 12);
      pass = pass && grouped == naive;
      const double fl = z_grouped(x, params, 12, tables).value;
      const double exact = static_cast<double>(grouped);
      const double rel = std::abs(fl - exact) / exact;
      worst = std::max(worst, rel);
      pass = pass && rel <= 1e-12;
    }
  }
  report(1, "oracle equivalence", pass, "exact match on 6 cases, worst float rel err " + fmt(worst), since(t0));
}

void slope() {
  const auto t0 = std::chrono::steady_clock::now();
  const SieveTables tables = build_sieve(1u << 22);
  const FitResult f2 = fit_loglog(scan(2, Rational(1, 1000000), Rational(1, 1000), 12, 1e-2, tables, {0}));
  const FitResult f3 = fit_loglog(scan(3, Rational(1, 1000000), Rational(1, 1000), 12, 1e-2, tables, {0}));
  const bool pass = f2.gap() <= 0.1 && f3.gap() <= 0.12;
  report(2, "log-log slope", pass,
         "k=2 slope " + fmt(f2.slope) + " (target 1.5 +- 0.1), k=3 slope " + fmt(f3.slope) + " (target " +
             fmt(f3.expected_slope) + " +- 0.12)",
         since(t0));
}

void mu_tail() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Rational> ys{Rational(1, 100), Rational(1, 1000), Rational(1, 10000)};
  const double tol[] = {0.15, 0.10, 0.05};
  const MuTailReport r = verify_mu_tail(2, ys);
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    pass = pass && std::abs(r.rows[i].ratio - 1.0) <= tol[i];
    detail += "y=" + r.rows[i].y.str() + " ratio " + fmt(r.rows[i].ratio) + " C " + fmt(r.rows[i].c_estimate) + "; ";
  }
  pass = pass && r.c_spread() <= 2.0;
  report(3, "squarefree tail ratio", pass, detail + "C spread " + fmt(r.c_spread()) + " (<= 2)", since(t0));
}

void lemmas() {
  const auto t0 = std::chrono::steady_clock::now();
  const SieveTables tables = build_sieve(100000);
  bool pass = true;
  std::string detail;
  for (int k = 2; k <= 4; ++k) {
    const FkBoundsReport r = verify_fk_bounds(k, 100000, tables);
    pass = pass && r.ok();
    detail += "fk k=" + std::to_string(k) + " " + std::to_string(r.violations.size()) + "/" +
              std::to_string(r.checked) + "; ";
  }
  const std::vector<Rational> grid{Rational(1, 7), Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(9, 10)};
  const PhiReport approx = verify_phi_approx(10000, grid, tables);
  pass = pass && approx.ok();
  detail += "phi approx " + std::to_string(approx.failures.size()) + "/" + std::to_string(approx.checked) + "; ";
  for (int k = 2; k <= 4; ++k) {
    const auto samples = random_phi_samples(10000, 10000, k, tables);
    const PhiReport id = verify_phi_identity(samples, k, tables);
    pass = pass && id.ok() && id.checked == 10000;
    detail += "phi identity k=" + std::to_string(k) + " " + std::to_string(id.failures.size()) + "/" +
              std::to_string(id.checked) + "; ";
  }
  report(4, "exhaustive bound checks", pass, detail + "violations/checked", since(t0));
}

void direct_space() {
  const auto t0 = std::chrono::steady_clock::now();
  const double pi = std::numbers::pi;
  const Patch big = generate_patch(2, 1000000);
  const double dens_err = std::abs(density(big) - 6.0 / (pi * pi));

  const Patch p = generate_patch(2, 100000);
  const SieveTables tables = build_sieve(4);
  const double closed = intensity(1, 4, KFreeParams::make(2), tables);
  const double at_quarter = empirical_intensity(p, Rational(1, 4));
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  const double at_golden = empirical_intensity(p, golden);

  const bool pass = dens_err < 2e-3 && std::abs(at_quarter - closed) <= 0.01 && at_golden < 1e-2;
  report(5, "direct-space consistency", pass,
         "|density - 6/pi^2| " + fmt(dens_err) + ", I(1/4) " + fmt(at_quarter) + " vs " + fmt(closed) +
             ", I(golden) " + fmt(at_golden),
         since(t0));
}

void determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  auto run = [](const char* threads) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run({"zscan", "--k", "2", "--threads", threads}, out, err);
    return std::make_pair(code, out.str());
  };
  const auto one = run("1");
  const auto eight = run("8");
  const bool pass = one.first == 0 && eight.first == 0 && one.second == eight.second;
  report(6, "zscan determinism", pass,
         "threads 1 vs 8, " + std::to_string(one.second.size()) + " bytes, " + (pass ? "identical" : "different"),
         since(t0));
}

}  // namespace

int main() {
  oracle_equivalence();
  slope();
  mu_tail();
  lemmas();
  direct_space();
  determinism();
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
