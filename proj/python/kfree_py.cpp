#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <mutex>
#include <sstream>

#include "kfree/asymptotics.hpp"
#include "kfree/cli.hpp"
#include "kfree/diffraction.hpp"
#include "kfree/directspace.hpp"
#include "kfree/errors.hpp"

namespace py = pybind11;
using namespace kfree;

namespace {

// Accepts int, fractions.Fraction, "m/q" strings and floats (made dyadic).
Rational to_rational(const py::handle& h) {
  if (py::isinstance<py::str>(h)) return Rational::parse(h.cast<std::string>());
  if (py::isinstance<py::float_>(h)) return Rational::from_double(h.cast<double>());
  if (py::hasattr(h, "numerator") && py::hasattr(h, "denominator")) {
    return Rational(h.attr("numerator").cast<std::int64_t>(), h.attr("denominator").cast<std::int64_t>());
  }
  throw py::type_error("expected int, Fraction, float or 'm/q' string");
}

py::object to_fraction(const Rational& r) {
  return py::module_::import("fractions").attr("Fraction")(r.num(), r.den());
}

py::object to_fraction(const BigRational& r) {
  const py::object int_type = py::module_::import("builtins").attr("int");
  return py::module_::import("fractions")
      .attr("Fraction")(int_type(numerator(r).str()), int_type(denominator(r).str()));
}

const KFreeParams& params_for(int k) {
  static std::mutex m;
  static std::map<int, KFreeParams> cache;
  std::lock_guard lock(m);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, KFreeParams::make(k)).first;
  return it->second;
}

}  // namespace

PYBIND11_MODULE(_kfree, m) {
  m.doc() = "k-free integer diffraction core";

  py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<SieveTables>(m, "Sieve")
      .def(py::init([](std::uint64_t limit) { return build_sieve(limit); }), py::arg("limit"))
      .def_property_readonly("limit", &SieveTables::limit)
      .def("mu", &SieveTables::mu)
      .def("rad", &SieveTables::rad)
      .def("spf", &SieveTables::spf)
      .def("squarefree", &SieveTables::squarefree);

  m.def("radical", &radical, py::arg("n"), py::arg("sieve"));
  m.def("euler_phi", &euler_phi, py::arg("n"), py::arg("sieve"));
  m.def(
      "two_param_totient",
      [](const py::object& x, std::uint32_t q, const SieveTables& t) { return two_param_totient(to_rational(x), q, t); },
      py::arg("x"), py::arg("q"), py::arg("sieve"));
  m.def(
      "zeta",
      [](int k, double rel_tol) {
        const ZetaValue z = zeta(k, rel_tol);
        return py::make_tuple(z.value, z.error);
      },
      py::arg("k"), py::arg("rel_tol") = 1e-12, "(value, certified error)");

  m.def(
      "f_k", [](std::uint32_t q, int k, const SieveTables& t) { return to_fraction(f_k(q, params_for(k), t)); },
      py::arg("q"), py::arg("k"), py::arg("sieve"));
  m.def(
      "intensity", [](std::int64_t mm, std::uint32_t q, int k, const SieveTables& t) {
        return intensity(mm, q, params_for(k), t);
      },
      py::arg("m"), py::arg("q"), py::arg("k"), py::arg("sieve"));
  m.def(
      "enumerate_support",
      [](int k, const py::object& lo, const py::object& hi, std::uint32_t q_max, const SieveTables& t) {
        const SupportListing s = enumerate_support(params_for(k), to_rational(lo), to_rational(hi), q_max, t);
        py::list out;
        for (const auto& p : s.points) out.append(py::make_tuple(p.m, p.q, to_fraction(p.z), p.intensity));
        return out;
      },
      py::arg("k"), py::arg("x_lo"), py::arg("x_hi"), py::arg("q_max"), py::arg("sieve"),
      "list of (m, q, z, intensity) ascending in z");

  py::class_<ZValue>(m, "ZValue")
      .def_property_readonly("x", [](const ZValue& z) { return to_fraction(z.x); })
      .def_readonly("value", &ZValue::value)
      .def_readonly("tail_bound", &ZValue::tail_bound)
      .def_readonly("cutoff_qbar", &ZValue::cutoff_qbar)
      .def_readonly("flagged", &ZValue::flagged)
      .def("__repr__", [](const ZValue& z) {
        std::ostringstream s;
        s << "ZValue(x=" << z.x.str() << ", value=" << z.value << ", tail_bound=" << z.tail_bound
          << ", cutoff_qbar=" << z.cutoff_qbar << ")";
        return s.str();
      });

  m.def(
      "z_grouped",
      [](const py::object& x, int k, std::uint32_t qbar_max, const SieveTables& t, unsigned threads) {
        const Rational r = to_rational(x);
        py::gil_scoped_release release;
        return z_grouped(r, params_for(k), qbar_max, t, {threads});
      },
      py::arg("x"), py::arg("k"), py::arg("qbar_max"), py::arg("sieve"), py::arg("threads") = 1);
  m.def(
      "z_grouped_exact",
      [](const py::object& x, int k, std::uint32_t qbar_max, const SieveTables& t) {
        return to_fraction(z_grouped_exact(to_rational(x), params_for(k), qbar_max, t));
      },
      py::arg("x"), py::arg("k"), py::arg("qbar_max"), py::arg("sieve"));
  m.def(
      "z_naive_exact",
      [](const py::object& x, int k, std::uint32_t q_max, const SieveTables& t, std::uint32_t radical_cap) {
        return to_fraction(z_naive_exact(to_rational(x), params_for(k), q_max, t, radical_cap));
      },
      py::arg("x"), py::arg("k"), py::arg("q_max"), py::arg("sieve"), py::arg("radical_cap") = 0);
  m.def(
      "z_adaptive",
      [](const py::object& x, int k, double rel_tol, const SieveTables& t, unsigned threads) {
        const Rational r = to_rational(x);
        py::gil_scoped_release release;
        return z_adaptive(r, params_for(k), rel_tol, t, {threads});
      },
      py::arg("x"), py::arg("k"), py::arg("rel_tol"), py::arg("sieve"), py::arg("threads") = 1);
  m.def(
      "tail_bound",
      [](std::uint32_t qbar_max, const py::object& x, int k) {
        return tail_bound(qbar_max, to_rational(x), params_for(k));
      },
      py::arg("qbar_max"), py::arg("x"), py::arg("k"));
  m.def(
      "min_contributing_qbar", [](const py::object& x, int k) { return min_contributing_qbar(to_rational(x), k); },
      py::arg("x"), py::arg("k"));

  py::class_<Patch>(m, "Patch")
      .def_property_readonly("k", &Patch::k)
      .def_property_readonly("size", &Patch::size)
      .def_property_readonly("count", &Patch::count)
      .def("__contains__", &Patch::contains);
  m.def(
      "generate_patch", [](int k, std::uint64_t n) { return generate_patch(k, n); }, py::arg("k"), py::arg("n"));
  m.def("density", &density, py::arg("patch"));
  m.def(
      "pair_frequencies", [](const Patch& p, std::uint64_t m_max) { return pair_frequencies(p, m_max).eta; },
      py::arg("patch"), py::arg("m_max"));
  m.def(
      "empirical_intensity",
      [](const Patch& p, const py::object& z) {
        if (py::isinstance<py::float_>(z)) return empirical_intensity(p, z.cast<double>());
        return empirical_intensity(p, to_rational(z));
      },
      py::arg("patch"), py::arg("z"), "exact phase for int/Fraction/str z, floating phase for float z");

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("slope", &FitResult::slope)
      .def_readonly("intercept", &FitResult::intercept)
      .def_readonly("r_squared", &FitResult::r_squared)
      .def_readonly("max_residual", &FitResult::max_residual)
      .def_readonly("expected_slope", &FitResult::expected_slope)
      .def_readonly("points", &FitResult::points)
      .def_property_readonly("gap", &FitResult::gap);

  m.def(
      "scan",
      [](int k, const py::object& x_min, const py::object& x_max, int points, double rel_tol, const SieveTables& t,
         unsigned threads) {
        const Rational lo = to_rational(x_min);
        const Rational hi = to_rational(x_max);
        py::gil_scoped_release release;
        return scan(k, lo, hi, points, rel_tol, t, {threads}).rows;
      },
      py::arg("k"), py::arg("x_min"), py::arg("x_max"), py::arg("points"), py::arg("rel_tol"), py::arg("sieve"),
      py::arg("threads") = 1, "list of ZValue by descending x");
  m.def(
      "fit_loglog",
      [](const std::vector<double>& xs, const std::vector<double>& values, int k) {
        return fit_loglog(xs, values, k);
      },
      py::arg("xs"), py::arg("values"), py::arg("k"));

  m.def(
      "verify_fk_bounds",
      [](int k, std::uint32_t q_max, const SieveTables& t) {
        const FkBoundsReport r = verify_fk_bounds(k, q_max, t);
        return py::make_tuple(r.checked, r.violations);
      },
      py::arg("k"), py::arg("q_max"), py::arg("sieve"), "(checked, violating q)");
  m.def(
      "verify_phi_approx",
      [](std::uint32_t q_max, const std::vector<py::object>& grid, const SieveTables& t) {
        std::vector<Rational> xs;
        for (const auto& x : grid) xs.push_back(to_rational(x));
        const PhiReport r = verify_phi_approx(q_max, xs, t);
        return py::make_tuple(r.checked, r.failures.size());
      },
      py::arg("q_max"), py::arg("x_grid"), py::arg("sieve"), "(checked, failures)");
  m.def(
      "verify_mu_tail",
      [](int k, const std::vector<py::object>& ys) {
        std::vector<Rational> grid;
        for (const auto& y : ys) grid.push_back(to_rational(y));
        py::list rows;
        for (const auto& r : verify_mu_tail(k, grid).rows) {
          py::dict d;
          d["y"] = to_fraction(r.y);
          d["partial_sum"] = r.partial_sum;
          d["main_term"] = r.main_term;
          d["ratio"] = r.ratio;
          d["c_estimate"] = r.c_estimate;
          rows.append(d);
        }
        return rows;
      },
      py::arg("k"), py::arg("y_grid"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "(exit code, stdout, stderr)");
}
