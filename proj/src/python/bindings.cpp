#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modstab/config.hpp"
#include "modstab/direct_method.hpp"
#include "modstab/error.hpp"
#include "modstab/experiment.hpp"
#include "modstab/fixed_point.hpp"
#include "modstab/modular.hpp"
#include "modstab/radical.hpp"
#include "modstab/verification.hpp"

namespace py = pybind11;
using namespace modstab;

namespace {

py::dict limit_to_dict(const LimitResult& r) {
    py::dict d;
    d["mode"] = to_string(r.mode);
    d["x"] = r.grid.points();
    d["values"] = r.values;
    d["cauchy_gap"] = r.cauchy_gap;
    d["frozen"] = r.frozen;
    d["achieved_n"] = r.achieved_n;
    d["saturated"] = r.saturated;
    return d;
}

py::dict series_to_dict(const SeriesBound& b) {
    py::dict d;
    d["value"] = b.value;
    d["terms_used"] = b.terms_used;
    d["tail_estimate"] = b.tail_estimate;
    d["converged"] = b.converged;
    d["ratio"] = b.ratio;
    d["certified"] = b.certified();
    return d;
}

py::dict certificate_to_dict(const ContractionCertificate& c) {
    py::dict d;
    d["L_hat"] = c.L_hat;
    d["worst_sample"] = c.worst_sample;
    d["valid"] = c.valid;
    d["samples_checked"] = c.samples_checked;
    d["samples_skipped"] = c.samples_skipped;
    return d;
}

py::dict fixed_point_to_dict(const FixedPointResult& r) {
    py::dict d;
    d["x"] = r.grid.points();
    d["values"] = r.values;
    d["iterations"] = r.iterations;
    d["rho_hat_gap"] = r.rho_hat_gap;
    d["gap_history"] = r.gap_history;
    d["saturated"] = r.saturated;
    d["certificate"] = certificate_to_dict(r.certificate);
    d["bound"] = r.bound;
    d["residual"] = r.residual;
    d["bound_ok"] = r.bound_ok;
    return d;
}

py::dict check_to_dict(const CheckOutcome& c) {
    py::dict d;
    d["name"] = c.name;
    d["passed"] = c.passed;
    d["worst_point"] = c.worst_point;
    d["worst_value"] = c.worst_value;
    d["tolerance"] = c.tolerance;
    return d;
}

LimitMode parse_mode(const std::string& mode) {
    if (mode == "contract") return LimitMode::contract;
    if (mode == "expand") return LimitMode::expand;
    throw ArgumentError("mode must be 'contract' or 'expand'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stability checks for the radical functional equation in modular spaces";

    auto base = py::register_exception<Error>(m, "ModstabError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
    py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<SaturationError>(m, "SaturationError", base.ptr());

    py::class_<ModularSpec>(m, "ModularSpec")
        .def_static("power", &ModularSpec::power, py::arg("p"), py::arg("tau") = py::none())
        .def_static("exp", &ModularSpec::exp)
        .def_static("parse", &ModularSpec::parse)
        .def_property_readonly("is_convex", &ModularSpec::is_convex)
        .def_property_readonly("delta2_tau", &ModularSpec::delta2_tau)
        .def("__call__", [](const ModularSpec& s, double u) { return rho_eval(s, u); })
        .def("__str__", &ModularSpec::to_string)
        .def("__repr__", [](const ModularSpec& s) { return "ModularSpec('" + s.to_string() + "')"; });

    py::class_<FunctionHandle>(m, "Function")
        .def_static("parse", &FunctionHandle::parse)
        .def("__call__", &FunctionHandle::operator())
        .def("__str__", &FunctionHandle::to_string)
        .def("__repr__", [](const FunctionHandle& f) { return "Function('" + f.to_string() + "')"; });

    py::class_<ControlFunction>(m, "Control")
        .def_static("power", &ControlFunction::power, py::arg("theta"), py::arg("p"))
        .def_static("constant", &ControlFunction::constant, py::arg("eps"))
        .def_static("parse", &ControlFunction::parse)
        .def("__call__", &ControlFunction::operator())
        .def("__str__", &ControlFunction::to_string);

    py::class_<EquationParams>(m, "Equation")
        .def(py::init<int, double>(), py::arg("s") = 3, py::arg("q") = 1.0)
        .def_readonly("s", &EquationParams::s)
        .def_readonly("q", &EquationParams::q);

    py::class_<SampleGrid>(m, "Grid")
        .def(py::init<double, double, std::size_t>(), py::arg("lo") = -10.0, py::arg("hi") = 10.0,
             py::arg("count") = 41)
        .def_property_readonly("points", &SampleGrid::points);

    m.def("radical_combine", &radical_combine, py::arg("eq"), py::arg("x"), py::arg("y"), py::arg("z"));
    m.def("defect", &defect, py::arg("eq"), py::arg("phi"), py::arg("rho"), py::arg("x"), py::arg("y"), py::arg("z"));

    m.def(
        "construct_limit",
        [](const std::string& mode, const FunctionHandle& phi, const EquationParams& eq, const ModularSpec& rho,
           const SampleGrid& grid, double tol, int n_max) {
            LimitOptions opts;
            opts.tol = tol;
            opts.n_max = n_max;
            return limit_to_dict(construct_limit(parse_mode(mode), phi, eq, rho, grid, opts));
        },
        py::arg("mode"), py::arg("phi"), py::arg("eq"), py::arg("rho"), py::arg("grid"), py::arg("tol") = 1e-9,
        py::arg("n_max") = 60);

    m.def(
        "series_bound_contract",
        [](const ControlFunction& a, double tau, int s, double x) { return series_to_dict(series_bound_contract(a, tau, s, x)); },
        py::arg("alpha"), py::arg("tau"), py::arg("s"), py::arg("x"));
    m.def(
        "series_bound_expand",
        [](const ControlFunction& a, int s, double x) { return series_to_dict(series_bound_expand(a, s, x)); },
        py::arg("alpha"), py::arg("s"), py::arg("x"));
    m.def("corollary_bound", &corollary_bound, py::arg("theta"), py::arg("p"), py::arg("s"), py::arg("tau"), py::arg("x"));

    m.def(
        "estimate_L",
        [](const ControlFunction& a, int s, const std::vector<double>& samples) {
            return certificate_to_dict(estimate_L(a, s, samples));
        },
        py::arg("alpha"), py::arg("s"), py::arg("samples"));
    m.def(
        "fixed_point_solve",
        [](const FunctionHandle& phi, const EquationParams& eq, const ModularSpec& rho, const ControlFunction& a,
           const SampleGrid& grid, double tol, int n_max) {
            FixedPointOptions opts;
            opts.tol = tol;
            opts.n_max = n_max;
            return fixed_point_to_dict(fixed_point_solve(phi, eq, rho, a, grid, opts));
        },
        py::arg("phi"), py::arg("eq"), py::arg("rho"), py::arg("alpha"), py::arg("grid"), py::arg("tol") = 1e-9,
        py::arg("n_max") = 60);

    m.def(
        "verify_radical_additivity",
        [](const FunctionHandle& A, const ModularSpec& rho, int s, const SampleGrid& grid, double tol) {
            return check_to_dict(verify_radical_additivity(A, rho, s, grid, tol));
        },
        py::arg("A"), py::arg("rho"), py::arg("s"), py::arg("grid"), py::arg("tol") = 1e-6);

    m.def(
        "check_modular",
        [](const std::string& spec) { return to_json_text(modular_report(ModularSpec::parse(spec))); },
        py::arg("spec"), "Axiom and Delta_2 report for a modular spec, as JSON text.");

    m.def(
        "run_config",
        [](const std::string& text) {
            const auto out = run_experiment(parse_experiment_config(text));
            return py::make_tuple(to_json_text(out.report), out.exit_code);
        },
        py::arg("text"), "Runs a config given as text; returns (report JSON text, exit code).");
}
