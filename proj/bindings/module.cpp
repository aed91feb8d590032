#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xxzsim/analysis.hpp"
#include "xxzsim/config.hpp"
#include "xxzsim/couplings.hpp"
#include "xxzsim/dtwa.hpp"
#include "xxzsim/ed_oracle.hpp"
#include "xxzsim/errors.hpp"
#include "xxzsim/scenarios.hpp"

namespace py = pybind11;
using namespace xxzsim;

namespace {

py::dict curve_to_dict(const std::vector<analysis::CurvePoint>& curve) {
    std::vector<double> t, sl, sl_err, vmin, vmax, theta, xi2, xi2_err, db;
    for (const auto& p : curve) {
        t.push_back(p.t);
        sl.push_back(p.spin_length);
        sl_err.push_back(p.spin_length_err);
        vmin.push_back(p.var_min);
        vmax.push_back(p.var_max);
        theta.push_back(p.theta_min);
        xi2.push_back(p.xi2);
        xi2_err.push_back(p.xi2_err);
        db.push_back(p.db);
    }
    py::dict d;
    d["t"] = t;
    d["spin_length"] = sl;
    d["spin_length_err"] = sl_err;
    d["var_min"] = vmin;
    d["var_max"] = vmax;
    d["theta_min"] = theta;
    d["xi2"] = xi2;
    d["xi2_err"] = xi2_err;
    d["db"] = db;
    return d;
}

RunConfig config_from_kwargs(const py::kwargs& kwargs) {
    RunConfig cfg;
    if (kwargs.contains("preset"))
        cfg = preset_config(kwargs["preset"].cast<std::string>());
    for (auto item : kwargs) {
        const auto key = item.first.cast<std::string>();
        if (key == "preset") continue;
        apply_config_key(cfg, key, py::str(item.second).cast<std::string>());
    }
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "XXZ spin-squeezing simulator: DTWA engine, exact oracle, analysis";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    py::class_<SpinCouplings>(m, "SpinCouplings")
        .def_readonly("J", &SpinCouplings::J)
        .def_readonly("Jz", &SpinCouplings::Jz)
        .def_readonly("hz", &SpinCouplings::hz)
        .def_readonly("delta", &SpinCouplings::delta)
        .def_readonly("hz_over_J", &SpinCouplings::J_hz_ratio)
        .def_readonly("t_over_J", &SpinCouplings::t_over_J)
        .def("__repr__", [](const SpinCouplings& c) {
            return "SpinCouplings(J=" + std::to_string(c.J) +
                   ", Jz=" + std::to_string(c.Jz) + ", hz=" + std::to_string(c.hz) + ")";
        });

    m.def(
        "derive_couplings",
        [](double t_tunnel, double u_uu, double u_dd, double u_ud) {
            return derive_couplings({t_tunnel, u_uu, u_dd, u_ud});
        },
        py::arg("t_tunnel"), py::arg("u_uu"), py::arg("u_dd"), py::arg("u_ud"),
        "Spin couplings from Hubbard parameters via the superexchange map.");

    m.def(
        "time_unit_seconds",
        [](double j_hz) { return to_sim_units(couplings_from_ratios(1, 0, 0), j_hz).time_unit_seconds; },
        py::arg("j_hz"), "Wall-clock seconds of one hbar/J at exchange frequency j_hz.");

    m.def(
        "run_dtwa",
        [](const py::kwargs& kwargs) { return curve_to_dict(scenarios::run_dtwa(config_from_kwargs(kwargs))); },
        "DTWA ensemble squeezing curve. Accepts preset=... plus any config key.");

    m.def(
        "run_oracle",
        [](const py::kwargs& kwargs) { return curve_to_dict(scenarios::run_oracle(config_from_kwargs(kwargs))); },
        "Exact-evolution squeezing curve (<= 14 spins).");

    m.def(
        "run_params",
        [](const py::kwargs& kwargs) { return scenarios::run_params(config_from_kwargs(kwargs)); },
        "One-line JSON coupling record from Hubbard inputs.");

    m.def(
        "run_imaging_demo",
        [](const py::kwargs& kwargs) {
            const auto s = scenarios::run_imaging_demo(config_from_kwargs(kwargs));
            py::dict d;
            d["injected"] = s.injected;
            d["recovered"] = s.recovered;
            d["recovered_err"] = s.recovered_err;
            d["var_atoms"] = s.var_atoms;
            d["var_noatoms"] = s.var_noatoms;
            d["n_estimate"] = s.n_estimate;
            d["residual_rms_rel"] = s.residual_rms_rel;
            return d;
        },
        "Synthetic polarization-contrast imaging round trip.");

    m.def(
        "variance_scan",
        [](double var_yy, double cov_yz, double var_zz) {
            const auto s = analysis::variance_scan({var_yy, cov_yz, var_zz});
            py::dict d;
            d["var_min"] = s.var_min;
            d["var_max"] = s.var_max;
            d["theta_min"] = s.theta_min;
            d["theta_max"] = s.theta_max;
            d["degenerate"] = s.degenerate;
            return d;
        },
        py::arg("var_yy"), py::arg("cov_yz"), py::arg("var_zz"),
        "Closed-form variance extrema over the rotation angle.");

    m.def(
        "squeezing_parameter",
        [](double var_min, double mean_sx, double n) {
            const auto p = analysis::squeezing_parameter(var_min, mean_sx, n);
            return py::make_tuple(p.xi2, p.db);
        },
        py::arg("var_min"), py::arg("mean_sx"), py::arg("n_atoms"));

    m.def(
        "jackknife",
        [](const std::vector<double>& samples, const std::function<double(std::vector<double>)>& f) {
            const auto r = analysis::jackknife(
                samples, [&](std::span<const double> s) {
                    return f(std::vector<double>(s.begin(), s.end()));
                });
            return py::make_tuple(r.estimate, r.sigma);
        },
        py::arg("samples"), py::arg("estimator"),
        "Leave-one-out jackknife (estimate, sigma) of an arbitrary estimator.");

    m.def("preset_names", [] {
        std::vector<std::string> names;
        for (const auto& p : presets()) names.push_back(p.name);
        return names;
    });

    m.def("config_keys", [] { return config_key_names(); });
}
