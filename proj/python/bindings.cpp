// Copyright 2026 The risqkd Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "risqkd/experiments.hpp"
#include "risqkd/qubo.hpp"

namespace py = pybind11;
using namespace risqkd;

namespace {

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["snr_linear"] = m.snr_linear;
    d["ber"] = m.ber;
    d["qber"] = m.qber;
    d["skr_bits_s"] = m.skr_bits_s;
    d["cost"] = m.cost;
    return d;
}

RunConfig config_from_text(const std::string& text) {
    std::istringstream is(text);
    RunConfig cfg = parse_config(is);
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dual-band RIS satellite QKD simulator";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_static("from_file", [](const std::string& path) {
            RunConfig cfg = load_config(path);
            cfg.validate();
            return cfg;
        })
        .def_static("from_string", &config_from_text)
        .def_readwrite("seed", &RunConfig::seed)
        .def_property(
            "elevations_deg", [](const RunConfig& c) { return c.sweep.elevations_deg; },
            [](RunConfig& c, std::vector<double> v) { c.sweep.elevations_deg = std::move(v); })
        .def_property(
            "ris_sizes", [](const RunConfig& c) { return c.sweep.ris_sizes; },
            [](RunConfig& c, std::vector<std::size_t> v) { c.sweep.ris_sizes = std::move(v); })
        .def("validate", &RunConfig::validate);

    py::class_<Calibration>(m, "Calibration")
        .def_readonly("rf_gain_offset_db", &Calibration::rf_gain_offset_db)
        .def_readonly("reference_power", &Calibration::reference_power)
        .def_readonly("effective_visibility", &Calibration::effective_visibility)
        .def_readonly("raw_rate_scale", &Calibration::raw_rate_scale)
        .def_readonly("element_amp_scale", &Calibration::element_amp_scale)
        .def_readonly("element_amp_scale_classical", &Calibration::element_amp_scale_classical);

    m.def("calibrate", &calibrate, py::arg("config"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "optimize",
        [](const RunConfig& cfg, const Calibration& cal, double elevation_deg, std::size_t n, std::size_t trial) {
            PointResult r;
            {
                py::gil_scoped_release release;
                r = optimize_point(cfg, cal, build_scenario(cfg, cal, elevation_deg, n, trial));
            }
            py::dict d;
            d["metrics"] = metrics_dict(r.metrics);
            d["baseline"] = metrics_dict(r.baseline);
            d["bits"] = r.solver.best_bits;
            d["feasible"] = r.feasible;
            d["evaluations"] = r.solver.evaluations;
            return d;
        },
        py::arg("config"), py::arg("calibration"), py::arg("elevation_deg"), py::arg("n_elements"),
        py::arg("trial") = 0);

    m.def(
        "sweep",
        [](const RunConfig& cfg, const Calibration& cal, unsigned threads) {
            std::vector<SweepRow> rows;
            {
                py::gil_scoped_release release;
                rows = sweep_elevation(cfg, cal, threads);
                delta_metrics(rows);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["elevation_deg"] = r.elevation_deg;
                d["n_elements"] = r.n_elements;
                d["trial"] = r.trial;
                d["snr_db"] = r.snr_db;
                d["ber"] = r.ber;
                d["qber"] = r.qber;
                d["skr_bits_s"] = r.skr_bits_s;
                d["cost"] = r.cost;
                d["feasible"] = r.feasible;
                d["delta_snr_db"] = r.delta_snr_db;
                d["delta_qber_pp"] = r.delta_qber_pp;
                out.append(d);
            }
            return out;
        },
        py::arg("config"), py::arg("calibration"), py::arg("threads") = 0);

    m.def(
        "qubo_text",
        [](const RunConfig& cfg, const Calibration& cal, double elevation_deg, std::size_t n) {
            const Scenario sc = build_scenario(cfg, cal, elevation_deg, n);
            const ReceiverModel rx = make_receiver(cfg, cal);
            const Metrics base =
                rx.evaluate(sc.state.direct_quantum.power(), sc.state.direct_classical.power(), Weights{});
            std::ostringstream os;
            write_qubo(os, build_qubo(sc.state, rx, resolve_weights(cfg.weights, base.snr_linear)));
            return os.str();
        },
        py::arg("config"), py::arg("calibration"), py::arg("elevation_deg"), py::arg("n_elements"));
}
