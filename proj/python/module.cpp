#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wprime/analyze.hpp"

namespace py = pybind11;

namespace wprime {

namespace {

py::dict trajectory_dict(const Trajectory& t) {
    py::dict d;
    d["Ts"] = t.ts;
    d["p"] = t.p;
    d["u"] = t.u;
    if (t.x) d["x"] = *t.x;
    if (t.xi) d["xi"] = *t.xi;
    if (t.y) d["y"] = *t.y;
    return d;
}

std::vector<SignalSpec> specs(const std::vector<std::string>& texts) {
    std::vector<SignalSpec> out;
    for (const auto& t : texts) out.push_back(parse_signal_spec(t));
    return out;
}

/// (n_omega, n_y, n_u) complex array
py::array_t<std::complex<double>> response_array(const FrequencyResponse& r) {
    const auto rows = r.values.empty() ? 0 : r.values.front().rows();
    const auto cols = r.values.empty() ? 0 : r.values.front().cols();
    py::array_t<std::complex<double>> out({static_cast<py::ssize_t>(r.values.size()), static_cast<py::ssize_t>(rows),
                                           static_cast<py::ssize_t>(cols)});
    auto view = out.mutable_unchecked<3>();
    for (std::size_t k = 0; k < r.values.size(); ++k)
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) view(k, i, j) = r.values[k](i, j);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "C++ core of the wprime package";

    auto base = py::register_exception<Error>(m, "WprimeError");
    py::register_exception<ModelError>(m, "ModelError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<WellposednessError>(m, "WellposednessError", base.ptr());

    py::class_<LpvStateSpace>(m, "LpvStateSpace")
        .def_static("from_json", [](const std::string& text) { return parse_model(text); }, py::arg("text"))
        .def_static("load", &load_model, py::arg("path"))
        .def("to_json", &serialize_model)
        .def_property_readonly("n_x", &LpvStateSpace::n_x)
        .def_property_readonly("n_u", &LpvStateSpace::n_u)
        .def_property_readonly("n_y", &LpvStateSpace::n_y)
        .def_property_readonly("n_p", &LpvStateSpace::n_p)
        .def_property_readonly("lower", [](const LpvStateSpace& s) { return s.domain().lower(); })
        .def_property_readonly("upper", [](const LpvStateSpace& s) { return s.domain().upper(); })
        .def("A", [](const LpvStateSpace& s, const std::vector<double>& p) { return eval_pmatrix(s.A(), p); })
        .def("B", [](const LpvStateSpace& s, const std::vector<double>& p) { return eval_pmatrix(s.B(), p); })
        .def("C", [](const LpvStateSpace& s, const std::vector<double>& p) { return eval_pmatrix(s.C(), p); })
        .def("D", [](const LpvStateSpace& s, const std::vector<double>& p) { return eval_pmatrix(s.D(), p); })
        .def("contains", [](const LpvStateSpace& s, const std::vector<double>& p) {
            return validate_point(s.domain(), p);
        });

    py::class_<StepMatrices>(m, "StepMatrices")
        .def_readonly("Axi", &StepMatrices::Axi)
        .def_readonly("Bxi", &StepMatrices::Bxi)
        .def_readonly("Cxi", &StepMatrices::Cxi)
        .def_readonly("Dxi", &StepMatrices::Dxi)
        .def_readonly("Xxi", &StepMatrices::Xxi)
        .def_readonly("Xu", &StepMatrices::Xu);

    m.def("phi", [](const Matrix& a, double ts) { return phi(a, DiscretizationConfig(ts)); }, py::arg("A"),
          py::arg("Ts"));
    m.def(
        "sigma_step",
        [](const LpvStateSpace& s, const std::vector<double>& p, double ts) {
            const auto r = sigma_step(s, p, DiscretizationConfig(ts));
            py::dict d;
            d["M11"] = r.m11;
            d["M12"] = r.m12;
            d["M21"] = r.m21;
            d["M22"] = r.m22;
            return d;
        },
        py::arg("model"), py::arg("p"), py::arg("Ts"));
    m.def(
        "dt_step_matrices",
        [](const LpvStateSpace& s, const std::vector<double>& p, double ts) {
            return dt_step_matrices(s, p, DiscretizationConfig(ts));
        },
        py::arg("model"), py::arg("p"), py::arg("Ts"));
    m.def(
        "tustin_frozen",
        [](const LpvStateSpace& s, const std::vector<double>& p, double ts) {
            return tustin_frozen(s, p, DiscretizationConfig(ts));
        },
        py::arg("model"), py::arg("p"), py::arg("Ts"));
    m.def(
        "similarity_residual",
        [](const StepMatrices& w, const StepMatrices& t, double ts) {
            return similarity_residual(w, t, DiscretizationConfig(ts));
        },
        py::arg("wprime"), py::arg("tustin"), py::arg("Ts"));
    m.def(
        "rinv_matrices", [](std::size_t n_x, double ts) { return rinv_matrices(n_x, DiscretizationConfig(ts)); },
        py::arg("n_x"), py::arg("Ts"));
    m.def(
        "wellposedness_check",
        [](const LpvStateSpace& s, double ts, std::size_t grid, std::size_t random, std::uint64_t seed) {
            const auto r = wellposedness_check(s, DiscretizationConfig(ts), grid, random, seed);
            py::dict d;
            d["Ts"] = r.ts;
            d["samples_checked"] = r.samples_checked;
            d["min_abs_det"] = r.min_abs_det;
            d["argmin_p"] = r.argmin_p;
            d["max_condition_number"] = r.max_condition_number;
            d["singular_points"] = r.singular_points;
            d["passed"] = r.passed;
            return d;
        },
        py::arg("model"), py::arg("Ts"), py::arg("grid_per_dim") = 5, py::arg("random_samples") = 100,
        py::arg("seed") = 42);

    m.def(
        "simulate_dt",
        [](const LpvStateSpace& s, double ts, const Matrix& p, const Matrix& u, const Vector& x0) {
            return trajectory_dict(simulate_dt(s, DiscretizationConfig(ts), Trajectory(ts, p, u), x0));
        },
        py::arg("model"), py::arg("Ts"), py::arg("p"), py::arg("u"), py::arg("x0"));
    m.def(
        "simulate_dt_loop_oracle",
        [](const LpvStateSpace& s, double ts, const Matrix& p, const Matrix& u, const Vector& x0) {
            return trajectory_dict(simulate_dt_loop_oracle(s, DiscretizationConfig(ts), Trajectory(ts, p, u), x0));
        },
        py::arg("model"), py::arg("Ts"), py::arg("p"), py::arg("u"), py::arg("x0"));
    m.def(
        "simulate_ct_reference",
        [](const LpvStateSpace& s, const std::vector<std::string>& p_signals, const std::vector<std::string>& u_signals,
           const Vector& x0, double t_end, int oversample, double ts) {
            return trajectory_dict(simulate_ct_reference(s, specs(p_signals), specs(u_signals), x0, t_end, oversample,
                                                         DiscretizationConfig(ts)));
        },
        py::arg("model"), py::arg("p_signals"), py::arg("u_signals"), py::arg("x0"), py::arg("T_end"),
        py::arg("oversample"), py::arg("Ts"));

    m.def("log_grid", &log_grid_n, py::arg("w_min"), py::arg("w_max"), py::arg("n"));
    m.def(
        "freqresp_ct",
        [](const LpvStateSpace& s, const std::vector<double>& p, const std::vector<double>& omegas) {
            return response_array(freqresp_ct(s, p, omegas));
        },
        py::arg("model"), py::arg("p"), py::arg("omegas"));
    m.def(
        "freqresp_dt",
        [](const StepMatrices& step, double ts, const std::vector<double>& omegas) {
            return response_array(freqresp_dt(step, DiscretizationConfig(ts), omegas));
        },
        py::arg("step"), py::arg("Ts"), py::arg("omegas"));
    m.def(
        "warping_residual",
        [](const LpvStateSpace& s, const std::vector<double>& p, double ts, const std::vector<double>& omegas) {
            return warping_residual(s, p, DiscretizationConfig(ts), omegas);
        },
        py::arg("model"), py::arg("p"), py::arg("Ts"), py::arg("omegas"));
    m.def(
        "convergence_order",
        [](const LpvStateSpace& s, const std::vector<std::string>& p_signals, const std::vector<std::string>& u_signals,
           const Vector& x0, double t_end, const std::vector<double>& ts_list, int oversample) {
            const auto r = convergence_order(s, {specs(p_signals), specs(u_signals), x0, t_end}, ts_list, oversample);
            py::list points;
            for (const auto& pt : r.points) points.append(py::make_tuple(pt.ts, pt.max_error, pt.pairwise_order));
            py::dict d;
            d["points"] = points;
            d["fitted_order"] = r.fitted_order;
            d["degenerate"] = r.degenerate;
            return d;
        },
        py::arg("model"), py::arg("p_signals"), py::arg("u_signals"), py::arg("x0"), py::arg("T_end"),
        py::arg("Ts_list"), py::arg("oversample") = 100);
}

}  // namespace wprime
