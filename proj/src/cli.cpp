#include "kfree/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kfree/arith.hpp"
#include "kfree/asymptotics.hpp"
#include "kfree/diffraction.hpp"
#include "kfree/directspace.hpp"
#include "kfree/errors.hpp"
#include "kfree/io.hpp"

namespace kfree::cli {

namespace {

using nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<int> k;
  std::string x_min = "1/1000000";
  std::string x_max = "1/1000";
  std::optional<int> points;
  double rel_tol = 1e-2;
  std::optional<std::uint32_t> q_max;
  std::uint64_t n = 100000;
  std::vector<std::string> z;
  std::string out_path;
  std::string format = "csv";
  unsigned threads = 0;
  double band = 0.1;
  std::uint32_t sieve_limit = std::uint32_t{1} << 22;
  std::uint64_t m_max = 10;
  std::string in_path;
  bool tamper_fk = false;
};

// Exact "m/q" or integer text stays exact; anything else is read as a double
// and converted to the nearest dyadic rational.
Rational parse_x(const std::string& text) {
  if (text.find_first_of(".eE") == std::string::npos) return Rational::parse(text);
  return Rational::from_double(io::parse_double(text));
}

int k_or(const RunConfig& c, int fallback) {
  const int k = c.k.value_or(fallback);
  if (k < 2) throw DomainError("--k must be >= 2");
  return k;
}

int default_points(const Rational& x_min, const Rational& x_max) {
  // 4 points per decade
  const double decades = std::log10(x_max.to_double() / x_min.to_double());
  return std::max(2, static_cast<int>(std::lround(4.0 * decades)) + 1);
}

// Collects a command's report in memory, then writes it in one piece so the
// output never interleaves and an unwritable path fails before any output.
class Sink {
 public:
  Sink(const RunConfig& c, std::ostream& stdout_stream) : path_(c.out_path), stdout_(stdout_stream) {}
  std::ostream& stream() { return buffer_; }
  void flush() {
    if (path_.empty() || path_ == "-") {
      stdout_ << buffer_.str();
      return;
    }
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw IoError("cannot open output file '" + path_ + "'");
    f << buffer_.str();
    if (!f) throw IoError("failed writing output file '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ostream& stdout_;
  std::ostringstream buffer_;
};

void require_format(const RunConfig& c) {
  if (c.format != "csv" && c.format != "json") throw DomainError("--format must be csv or json");
}

int cmd_spectrum(const RunConfig& c, std::ostream& out) {
  require_format(c);
  const int k = k_or(c, 2);
  const Rational lo = parse_x(c.x_min);
  const Rational hi = parse_x(c.x_max);
  const std::uint32_t q_max = c.q_max.value_or(100);
  const SieveTables tables = build_sieve(q_max);
  const KFreeParams params = KFreeParams::make(k);
  const SupportListing listing = enumerate_support(params, lo, hi, q_max, tables);
  const io::Metadata meta{{"command", "spectrum"},
                          {"k", std::to_string(k)},
                          {"x_lo", lo.str()},
                          {"x_hi", hi.str()},
                          {"q_max", std::to_string(q_max)},
                          {"qbar_min", std::to_string(listing.qbar_min)},
                          {"omitted_intensity_bound", io::format_double(listing.omitted_intensity_bound)}};
  Sink sink(c, out);
  if (c.format == "csv") {
    io::write_spectrum_csv(sink.stream(), listing, meta);
  } else {
    io::write_spectrum_json(sink.stream(), listing, meta);
  }
  sink.flush();
  return kOk;
}

ScanTable run_scan(const RunConfig& c, io::Metadata& meta) {
  const int k = k_or(c, 2);
  const Rational x_min = parse_x(c.x_min);
  const Rational x_max = parse_x(c.x_max);
  if (!x_min.positive() || !(x_min < x_max)) throw DomainError("need 0 < --x-min < --x-max");
  if (!(c.rel_tol > 0.0 && c.rel_tol < 1.0)) throw DomainError("--rel-tol must lie in (0, 1)");
  const int points = c.points.value_or(default_points(x_min, x_max));
  const SieveTables tables = build_sieve(c.sieve_limit);
  meta = {{"command", "zscan"},
          {"k", std::to_string(k)},
          {"x_min", x_min.str()},
          {"x_max", x_max.str()},
          {"points", std::to_string(points)},
          {"rel_tol", io::format_double(c.rel_tol)},
          {"sieve_limit", std::to_string(c.sieve_limit)}};
  return scan(k, x_min, x_max, points, c.rel_tol, tables, EvalOptions{c.threads});
}

int cmd_zscan(const RunConfig& c, std::ostream& out) {
  require_format(c);
  io::Metadata meta;
  const ScanTable table = run_scan(c, meta);
  Sink sink(c, out);
  if (c.format == "csv") {
    io::write_scan_csv(sink.stream(), table, meta);
  } else {
    io::write_scan_json(sink.stream(), table, meta);
  }
  sink.flush();
  return kOk;
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
  require_format(c);
  ScanTable table;
  if (!c.in_path.empty()) {
    std::ifstream f(c.in_path, std::ios::binary);
    if (!f) throw IoError("cannot open input table '" + c.in_path + "'");
    table = io::read_scan(f).table;
  } else {
    io::Metadata meta;
    table = run_scan(c, meta);
  }
  const FitResult fit = fit_loglog(table);
  const bool pass = fit.gap() <= c.band;
  Sink sink(c, out);
  if (c.format == "csv") {
    auto& s = sink.stream();
    s << "k,points,slope,expected_slope,gap,r_squared,max_residual,band,status\n";
    s << table.k << ',' << fit.points << ',' << io::format_double(fit.slope) << ','
      << io::format_double(fit.expected_slope) << ',' << io::format_double(fit.gap()) << ','
      << io::format_double(fit.r_squared) << ',' << io::format_double(fit.max_residual) << ','
      << io::format_double(c.band) << ',' << (pass ? "PASS" : "FAIL") << '\n';
  } else {
    ordered_json j;
    j["k"] = table.k;
    j["points"] = fit.points;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["expected_slope"] = fit.expected_slope;
    j["gap"] = fit.gap();
    j["r_squared"] = fit.r_squared;
    j["max_residual"] = fit.max_residual;
    j["band"] = c.band;
    j["status"] = pass ? "PASS" : "FAIL";
    sink.stream() << j.dump(2) << '\n';
  }
  sink.flush();
  return pass ? kOk : kFailure;
}

struct PatchFrequency {
  std::string label;
  double empirical = 0.0;
  double closed_form = 0.0;
};

int cmd_patch(const RunConfig& c, std::ostream& out) {
  require_format(c);
  const int k = k_or(c, 2);
  const Patch patch = generate_patch(k, c.n);
  const KFreeParams params = KFreeParams::make(k);
  const double dens = density(patch);
  const std::uint64_t m_max = std::min<std::uint64_t>(c.m_max, patch.size() - 1);
  const PairFrequencies eta = pair_frequencies(patch, m_max);

  std::vector<PatchFrequency> rows;
  for (const auto& text : c.z) {
    const bool exact = text.find_first_of(".eE") == std::string::npos;
    if (exact) {
      const Rational z = Rational::parse(text);
      const auto q = static_cast<std::uint32_t>(z.den());
      // closed form is 1-periodic and m-independent
      const SieveTables tables = build_sieve(q);
      const double closed = is_power_free(q, k + 1, tables) ? intensity(1, q, params, tables) : 0.0;
      rows.push_back({z.str(), empirical_intensity(patch, z), closed});
    } else {
      // a decimal frequency stands in for an irrational one: no atom there
      const double z = io::parse_double(text);
      rows.push_back({text, empirical_intensity(patch, z), 0.0});
    }
  }

  const io::Metadata meta{{"command", "patch"}, {"k", std::to_string(k)}, {"n", std::to_string(c.n)}};
  Sink sink(c, out);
  auto& s = sink.stream();
  if (c.format == "csv") {
    for (const auto& [key, v] : meta) s << "# " << key << '=' << v << '\n';
    s << "kind,key,empirical,closed_form\n";
    s << "density,," << io::format_double(dens) << ',' << io::format_double(1.0 / params.zeta_k.value) << '\n';
    for (std::uint64_t m = 0; m <= m_max; ++m) s << "eta," << m << ',' << io::format_double(eta.eta[m]) << ",\n";
    for (const auto& r : rows) {
      s << "intensity," << r.label << ',' << io::format_double(r.empirical) << ',' << io::format_double(r.closed_form)
        << '\n';
    }
  } else {
    ordered_json j;
    ordered_json m = ordered_json::object();
    for (const auto& [key, v] : meta) m[key] = v;
    j["meta"] = m;
    j["density"] = dens;
    j["density_limit"] = 1.0 / params.zeta_k.value;
    j["eta"] = eta.eta;
    j["intensities"] = ordered_json::array();
    for (const auto& r : rows) {
      j["intensities"].push_back({{"z", r.label}, {"empirical", r.empirical}, {"closed_form", r.closed_form}});
    }
    s << j.dump(2) << '\n';
  }
  sink.flush();
  return kOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const std::vector<int> ks = c.k ? std::vector<int>{k_or(c, 2)} : std::vector<int>{2, 3, 4};
  const std::uint32_t q_max = c.q_max.value_or(100000);
  const std::uint32_t phi_q_max = std::min<std::uint32_t>(q_max, 10000);
  const SieveTables tables = build_sieve(q_max);

  Sink sink(c, out);
  auto& s = sink.stream();
  bool all_ok = true;
  auto line = [&](bool ok, const std::string& text) {
    s << (ok ? "[PASS] " : "[FAIL] ") << text << '\n';
    all_ok = all_ok && ok;
  };

  FkFunction fk = f_k;
  if (c.tamper_fk) {
    fk = [](std::uint32_t q, const KFreeParams& p, const SieveTables& t) { return f_k(q, p, t) * 2; };
  }
  for (const int k : ks) {
    const auto r = verify_fk_bounds(k, q_max, tables, fk);
    line(r.ok(), "fk-bounds k=" + std::to_string(k) + " q<=" + std::to_string(q_max) +
                     " checked=" + std::to_string(r.checked) + " violations=" + std::to_string(r.violations.size()));
    if (r.q1_edge_reported) {
      s << "[NOTE] fk-bounds k=" << k << " q=1: f_k(1)=" << to_string(r.q1_value)
        << " sits on the lower bound (strict bounds start at q=2)\n";
    }
  }

  const std::vector<Rational> x_grid{Rational(1, 7), Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(9, 10)};
  for (const int k : ks) {
    const auto samples = random_phi_samples(10000, phi_q_max, k, tables);
    const auto r = verify_phi_identity(samples, k, tables);
    line(r.ok(), "phi-identity k=" + std::to_string(k) + " samples=" + std::to_string(r.checked) +
                     " failures=" + std::to_string(r.failures.size()));
  }
  {
    const auto r = verify_phi_approx(phi_q_max, x_grid, tables);
    line(r.ok(), "phi-approx q<=" + std::to_string(phi_q_max) + " checked=" + std::to_string(r.checked) +
                     " failures=" + std::to_string(r.failures.size()));
  }
  {
    const std::vector<Rational> ys{Rational(1, 100), Rational(1, 1000), Rational(1, 10000)};
    const double tol[] = {0.15, 0.10, 0.05};
    const auto r = verify_mu_tail(2, ys);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const auto& row = r.rows[i];
      line(std::abs(row.ratio - 1.0) <= tol[i], "mu-tail k=2 y=" + row.y.str() + " ratio=" +
                                                    io::format_double(row.ratio) + " C=" +
                                                    io::format_double(row.c_estimate));
    }
    line(r.c_spread() <= 2.0, "mu-tail C spread=" + io::format_double(r.c_spread()) + " (<= 2)");
  }
  for (const int k : ks) {
    const auto r = divisor_bound_threshold(k, 0.5, q_max, tables);
    s << "[INFO] divisor-bound k=" << k << " eps=0.5 q<=" << q_max << " violations=" << r.violation_count
      << " largest=" << (r.largest_violation ? std::to_string(*r.largest_violation) : "none") << '\n';
  }
  s << (all_ok ? "verify: all checks passed\n" : "verify: FAILED\n");
  sink.flush();
  return all_ok ? kOk : kFailure;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--k", c.k, "k >= 2");
  sub->add_option("--out", c.out_path, "output file (default stdout)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "worker threads (0 = auto)");
}

void add_scan_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--x-min", c.x_min, "smallest x (m/q exact, or decimal)");
  sub->add_option("--x-max", c.x_max, "largest x");
  sub->add_option("--points", c.points, "grid points (default 4 per decade)");
  sub->add_option("--rel-tol", c.rel_tol, "relative truncation tolerance");
  sub->add_option("--sieve-limit", c.sieve_limit, "largest radical the evaluator may use");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Diffraction of the k-free integers near the origin"};
  app.require_subcommand(1);

  auto* spectrum = app.add_subcommand("spectrum", "support points and intensities in (x-min, x-max]");
  add_common(spectrum, c);
  spectrum->add_option("--x-min", c.x_min, "window start (exclusive, >= 0)");
  spectrum->add_option("--x-max", c.x_max, "window end (inclusive)");
  spectrum->add_option("--q-max", c.q_max, "largest denominator");

  auto* zscan = app.add_subcommand("zscan", "Z_k(x) over a log grid");
  add_common(zscan, c);
  add_scan_options(zscan, c);

  auto* fit = app.add_subcommand("fit", "log-log slope of Z_k against 2 - 1/k");
  add_common(fit, c);
  add_scan_options(fit, c);
  fit->add_option("--in", c.in_path, "scan table written by zscan");
  fit->add_option("--band", c.band, "accepted |slope - (2 - 1/k)|");

  auto* patch = app.add_subcommand("patch", "direct-space statistics of V_k in [1, N]");
  add_common(patch, c);
  patch->add_option("--n", c.n, "patch size N");
  patch->add_option("--z", c.z, "frequency (m/q exact or decimal); repeatable");
  patch->add_option("--m-max", c.m_max, "largest pair distance");

  auto* verify = app.add_subcommand("verify", "run the arithmetic verification suite");
  add_common(verify, c);
  verify->add_option("--q-max", c.q_max, "range for the f_k bound check");
  verify->add_flag("--tamper-fk", c.tamper_fk, "double f_k before checking (mutation test)")->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(c, out);
    if (*zscan) return cmd_zscan(c, out);
    if (*fit) return cmd_fit(c, out);
    if (*patch) return cmd_patch(c, out);
    if (*verify) return cmd_verify(c, out);
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kCapacity;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace kfree::cli
