#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpb/bounds.hpp"
#include "gpb/config.hpp"
#include "gpb/error.hpp"
#include "gpb/gp_solver.hpp"
#include "gpb/run.hpp"
#include "gpb/scattering.hpp"
#include "gpb/tf_limit.hpp"

namespace py = pybind11;
using namespace gpb;

namespace {

// Reports cross the boundary as plain Python objects.
py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

GridKind grid_kind(const std::string& s) {
  if (s == "radial") return GridKind::radial;
  if (s == "cartesian") return GridKind::cartesian;
  throw DomainError("grid kind must be radial or cartesian, got '" + s + "'");
}

Boundary boundary(const std::string& s) {
  if (s == "decay") return Boundary::decay;
  if (s == "neumann") return Boundary::neumann;
  throw DomainError("boundary must be decay or neumann, got '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings of the gpbounds library";
  m.attr("__version__") = version();

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ScatteringRegimeError>(m, "ScatteringRegimeError", PyExc_RuntimeError);
  py::register_exception<RangeTooShortError>(m, "RangeTooShortError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def(py::init([](const std::string& kind, double h, double R, const std::string& b) {
             Grid g{grid_kind(kind), h, R, boundary(b)};
             g.validate();
             return g;
           }),
           py::arg("kind") = "radial", py::arg("h") = 0.02, py::arg("R") = 8.0,
           py::arg("boundary") = "decay")
      .def_readonly("h", &Grid::h)
      .def_readonly("R", &Grid::R)
      .def_property_readonly("kind", [](const Grid& g) { return to_string(g.kind); })
      .def_property_readonly("boundary", [](const Grid& g) { return to_string(g.boundary); })
      .def("__repr__", &Grid::describe);

  py::class_<TrapPotential>(m, "TrapPotential")
      .def_static("harmonic", &TrapPotential::harmonic)
      .def_static("power", &TrapPotential::power, py::arg("s"), py::arg("coef") = 1.0)
      .def_static("zero_in_box", &TrapPotential::zero_in_box)
      .def_static("tabulated", &TrapPotential::tabulated_radial, py::arg("r"), py::arg("v"),
                  py::arg("growth"), py::arg("convex") = false)
      .def("__call__", [](const TrapPotential& V, double r) { return V.radial(r); })
      .def("__repr__", &TrapPotential::describe);

  py::class_<InteractionPotential>(m, "InteractionPotential")
      .def_static("none", &InteractionPotential::none)
      .def_static("hard_sphere", &InteractionPotential::hard_sphere, py::arg("d"))
      .def_static("square_barrier", &InteractionPotential::square_barrier, py::arg("V0"),
                  py::arg("R0"))
      .def_static("hard_core_well",
                  py::overload_cast<double, double, double>(&InteractionPotential::hard_core_well),
                  py::arg("d"), py::arg("R0"), py::arg("depth"))
      .def_static("power_tail", &InteractionPotential::power_tail, py::arg("coef"), py::arg("p"),
                  py::arg("start"), py::arg("core") = 0.0)
      .def("__call__", [](const InteractionPotential& v, double r) { return v(r); })
      .def("__repr__", &InteractionPotential::describe);

  m.def(
      "ground_state",
      [](const TrapPotential& V, double a, double N, const Grid& grid, double tolerance,
         bool richardson) {
        SolverOptions o;
        o.tolerance = tolerance;
        o.richardson = richardson;
        Json j;
        {
          py::gil_scoped_release release;
          j = to_json(minimize(V, a, N, grid, o));
        }
        return to_python(j);
      },
      py::arg("V"), py::arg("a"), py::arg("N") = 1.0, py::arg("grid") = Grid{},
      py::arg("tolerance") = 1e-9, py::arg("richardson") = true,
      "GP minimizer on the grid, as a dict.");

  m.def(
      "scattering",
      [](const InteractionPotential& v, double tolerance) {
        ScatteringOptions o;
        o.tolerance = tolerance;
        return to_python(to_json(compute_scattering(v, o)));
      },
      py::arg("v"), py::arg("tolerance") = 1e-8, "Scattering length with its certificate.");

  m.def(
      "thomas_fermi",
      [](const TrapPotential& V, double N, double a) { return to_python(to_json(tf_minimize(V, N, a))); },
      py::arg("V"), py::arg("N"), py::arg("a"));

  m.def(
      "sandwich",
      [](const TrapPotential& V, const InteractionPotential& v1, double a1, double N) {
        Json j;
        {
          py::gil_scoped_release release;
          j = to_json(sandwich_report(V, v1, a1, N));
        }
        return to_python(j);
      },
      py::arg("V"), py::arg("v1"), py::arg("a1"), py::arg("N"),
      "Lower bound, GP energy and upper bound at a = a1/N.");

  m.def(
      "run",
      [](const std::string& command, const std::string& config_text, int threads) {
        const RunConfig cfg = parse_config(config_text);
        const Command c = parse_command(command);
        std::string out;
        {
          py::gil_scoped_release release;
          out = emit(gpb::run(c, cfg, RunOptions{threads, false}), Format::json);
        }
        return out;
      },
      py::arg("command"), py::arg("config_text"), py::arg("threads") = 1,
      "Batch command on INI text; returns the JSON report.");
}
