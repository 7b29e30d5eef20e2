#include "cvprivacy/errors.hpp"
#include "cvprivacy/fock_oracle.hpp"
#include "cvprivacy/gaussian_state.hpp"
#include "cvprivacy/json_io.hpp"
#include "cvprivacy/protocol_sim.hpp"
#include "cvprivacy/security.hpp"
#include "cvprivacy/sweep.hpp"
#include "cvprivacy/symplectic.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cvprivacy;

namespace {

BipartiteSplit to_split(const std::pair<int, int>& s) { return {s.first, s.second}; }

py::dict report_dict(const SecurityReport& r) {
    py::dict d;
    d["split"] = py::make_tuple(r.split.n_a, r.split.n_b);
    d["measured_coords"] = py::make_tuple(r.coords.alice, r.coords.bob);
    d["x0"] = r.x0;
    d["block_length"] = r.block_length;
    d["eps_ratio_exponent"] = r.eps_ratio_exponent;
    d["fidelity_exponent"] = r.fidelity_exponent;
    d["eps_B"] = r.eps_B;
    d["fidelity"] = r.fidelity;
    d["min_pt_symplectic_eigenvalue"] = r.min_pt_symplectic_eigenvalue;
    d["ppt"] = r.ppt;
    d["individual_secure"] = r.individual_secure;
    d["collective_secure"] = r.collective_secure;
    d["general_key_condition"] = r.general_key_condition;
    d["key_distillable"] = r.key_distillable;
    d["key_rate_estimate"] = r.key_rate_estimate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_cvprivacy, m) {
    m.doc() = "Security analysis of two-party Gaussian states";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    py::class_<GaussianState>(m, "GaussianState")
        .def(py::init<Matrix, Vector>(), py::arg("cov"), py::arg("disp"))
        .def(py::init<Matrix>(), py::arg("cov"))
        .def_static("vacuum", &GaussianState::vacuum, py::arg("n_modes"))
        .def_static("thermal", &GaussianState::thermal, py::arg("n_modes"), py::arg("nu"))
        .def_property_readonly("n_modes", &GaussianState::n_modes)
        .def_property_readonly("cov", &GaussianState::cov)
        .def_property_readonly("disp", &GaussianState::disp)
        .def("to_json", [](const GaussianState& s) { return state_to_json(s); })
        .def_static("from_json", [](const std::string& text) { return parse_state_json(text); })
        .def("__repr__", [](const GaussianState& s) {
            return "<GaussianState n_modes=" + std::to_string(s.n_modes()) + ">";
        });

    m.def(
        "symmetric_state",
        [](double lambda, double c_x, std::optional<double> c_p) {
            return make_symmetric_state({lambda, c_x, c_p.value_or(c_x)});
        },
        py::arg("lam"), py::arg("c_x"), py::arg("c_p") = py::none(),
        "A = B = lam I, C = diag(c_x, -c_p); c_p defaults to c_x.");
    m.def("two_mode_squeezed_vacuum", &two_mode_squeezed_vacuum, py::arg("r"));

    m.def("symplectic_form", &symplectic_form, py::arg("n_modes"));
    m.def("symplectic_eigenvalues", &symplectic_eigenvalues, py::arg("cov"));
    m.def(
        "williamson",
        [](const Matrix& c) {
            const auto w = williamson(c);
            return py::make_tuple(w.S, w.spectrum);
        },
        py::arg("cov"), "Returns (S, spectrum) with S cov S^T diagonal.");

    m.def("is_physical", &is_physical, py::arg("state"));
    m.def("purity", &purity, py::arg("state"));
    m.def(
        "is_nppt", [](const GaussianState& s, std::pair<int, int> split) { return is_nppt(s, to_split(split)); },
        py::arg("state"), py::arg("split") = std::pair<int, int>{1, 1});
    m.def(
        "min_pt_symplectic_eigenvalue",
        [](const GaussianState& s, std::pair<int, int> split) {
            return min_pt_symplectic_eigenvalue(s, to_split(split));
        },
        py::arg("state"), py::arg("split") = std::pair<int, int>{1, 1});
    m.def(
        "key_distillable",
        [](const GaussianState& s, std::pair<int, int> split) {
            const BipartiteSplit sp = to_split(split);
            return key_distillable(s, sp, default_coords(sp));
        },
        py::arg("state"), py::arg("split") = std::pair<int, int>{1, 1});

    m.def(
        "analyze",
        [](const GaussianState& s, std::pair<int, int> split, double x0, int n) {
            const BipartiteSplit sp = to_split(split);
            return report_dict(analyze(s, sp, default_coords(sp), x0, n));
        },
        py::arg("state"), py::arg("split") = std::pair<int, int>{1, 1}, py::arg("x0") = 1.0, py::arg("n") = 1);

    m.def(
        "sweep",
        [](std::tuple<double, double, int> lam, std::tuple<double, double, int> c, double x0) {
            SweepSpec spec;
            spec.lambda = {std::get<0>(lam), std::get<1>(lam), std::get<2>(lam)};
            spec.c = {std::get<0>(c), std::get<1>(c), std::get<2>(c)};
            spec.x0 = x0;
            py::gil_scoped_release release;
            return sweep_csv(sweep(spec));
        },
        py::arg("lam") = std::make_tuple(1.0, 3.0, 200), py::arg("c") = std::make_tuple(0.0, 3.0, 200),
        py::arg("x0") = 1.0, "CSV text with columns lambda,c,physical,nppt,individual,collective.");
    m.def(
        "collective_boundary",
        [](double lambda) {
            const auto b = collective_boundary(lambda);
            return py::make_tuple(b.c, b.residual);
        },
        py::arg("lam"));

    m.def(
        "simulate",
        [](const GaussianState& s, double x0, double delta, std::int64_t samples, std::uint64_t seed,
           std::vector<int> n_range, bool window) {
            ProtocolConfig cfg;
            cfg.X0 = x0;
            cfg.delta = delta;
            cfg.n_samples = samples;
            cfg.seed = seed;
            cfg.sampler = window ? Sampler::Window : Sampler::Rejection;
            py::gil_scoped_release release;
            const auto r = simulate(s, cfg, n_range, MeasuredCoords{0, 2});
            return simulation_to_json(r);
        },
        py::arg("state"), py::arg("x0") = 1.0, py::arg("delta") = 0.01, py::arg("samples") = 1'000'000,
        py::arg("seed") = kDefaultSeed, py::arg("n_range") = std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8},
        py::arg("window") = false, "Monte Carlo run of a 1x1 state; returns the JSON report.");

    m.def(
        "fock_fidelity",
        [](const GaussianState& a, const GaussianState& b, int cutoff) {
            return uhlmann_fidelity(gaussian_to_fock(a, cutoff), gaussian_to_fock(b, cutoff));
        },
        py::arg("a"), py::arg("b"), py::arg("cutoff") = 40, "Uhlmann fidelity in a truncated Fock basis.");
}
