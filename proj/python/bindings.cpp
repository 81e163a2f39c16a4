#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isl/ambarzumyan.hpp"
#include "isl/charfn.hpp"
#include "isl/problem_io.hpp"
#include "isl/report_io.hpp"
#include "isl/spectrum.hpp"

namespace py = pybind11;
using namespace isl;

namespace {

py::list entries_of(const Spectrum& s) {
  py::list out;
  for (const auto& e : s.entries) out.append(py::make_tuple(e.lambda, e.multiplicity, e.residual));
  return out;
}

}  // namespace

PYBIND11_MODULE(_isl, m) {
  m.doc() = "Compiled core of impulsive_sl";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<MultiplicityError>(m, "MultiplicityError", PyExc_ArithmeticError);

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def_static("from_json", &parse_problem_text, py::arg("text"))
      .def_readonly("dim", &ProblemSpec::dim)
      .def_readonly("alpha", &ProblemSpec::alpha)
      .def_readonly("a", &ProblemSpec::a)
      .def("to_json", [](const ProblemSpec& s) { return s.to_json().dump(); })
      .def("with_zero_potential", &ProblemSpec::with_zero_potential);

  py::class_<CharFnValue>(m, "CharFnValue")
      .def_readonly("log_mag", &CharFnValue::log_mag)
      .def_readonly("phase", &CharFnValue::phase)
      .def_readonly("raw", &CharFnValue::raw)
      .def("is_zero", &CharFnValue::is_zero)
      .def("sign", &CharFnValue::sign)
      .def("value", &CharFnValue::value);

  py::class_<CharacteristicFunction>(m, "CharacteristicFunction")
      .def(py::init<ProblemSpec, int>(), py::arg("spec"), py::arg("steps") = 0)
      .def("__call__", &CharacteristicFunction::operator(), py::arg("lam"),
           py::call_guard<py::gil_scoped_release>());

  m.def("omega0_exact", &omega0_exact, py::arg("spec"), py::arg("lam"));
  m.def("omega0_paper", &omega0_paper, py::arg("spec"), py::arg("lam"));
  m.def(
      "asymptotic_ratio",
      [](const CharacteristicFunction& w, double kappa) {
        const auto r = asymptotic_ratio(w, kappa);
        return py::make_tuple(r.ratio, r.ratio_exact_constant);
      },
      py::arg("omega"), py::arg("kappa"));

  m.def(
      "find_spectrum",
      [](const ProblemSpec& spec, int count, double s_step) {
        SpectrumOptions o;
        o.s_step = s_step;
        Spectrum s;
        {
          py::gil_scoped_release release;
          s = find_spectrum(spec, count, o);
        }
        return entries_of(s);
      },
      py::arg("spec"), py::arg("count"), py::arg("s_step") = 0.0);
  m.def(
      "fd_oracle_spectrum",
      [](const ProblemSpec& spec, int mesh, int count) {
        Spectrum s;
        {
          py::gil_scoped_release release;
          s = fd_oracle_spectrum(spec, mesh, count);
        }
        return entries_of(s);
      },
      py::arg("spec"), py::arg("mesh"), py::arg("count"));

  m.def(
      "trace_conditions",
      [](const ProblemSpec& spec) {
        const auto t = trace_conditions(spec);
        return py::make_tuple(t.trace_q1, t.trace_q2);
      },
      py::arg("spec"));
  m.def(
      "rayleigh_quotient",
      [](const ProblemSpec& spec, int i) {
        const auto r = rayleigh_quotient(spec, i);
        return py::make_tuple(r.closed_form, r.quadrature, r.printed_formula);
      },
      py::arg("spec"), py::arg("i"));
  m.def(
      "compare_spectra_json",
      [](const ProblemSpec& q, const ProblemSpec& zero, int count, double tol) {
        CompareOptions o;
        o.count = count;
        o.tol = tol;
        py::gil_scoped_release release;
        return to_json(compare_spectra(q, zero, o)).dump();
      },
      py::arg("spec_q"), py::arg("spec0"), py::arg("count") = 20, py::arg("tol") = 1e-3);
}
