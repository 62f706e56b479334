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

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "risqkd/experiments.hpp"
#include "risqkd/qubo.hpp"

namespace risqkd {

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void print_metrics(std::ostream& out, const Metrics& m) {
    out << "snr_db=" << num(10.0 * std::log10(m.snr_linear)) << '\n'
        << "ber=" << num(m.ber) << '\n'
        << "qber=" << num(m.qber) << '\n'
        << "skr_bits_s=" << num(m.skr_bits_s) << '\n'
        << "cost=" << num(m.cost) << '\n';
}

std::filesystem::path resolve_output(const RunConfig& cfg, const std::string& given, const char* fallback) {
    if (!given.empty()) return given;
    return std::filesystem::path(cfg.output_dir) / fallback;
}

void write_with_metadata(const std::filesystem::path& path, const std::vector<std::string>& meta,
                         const std::function<void(std::ostream&)>& body) {
    write_file_atomic(path, [&](std::ostream& os) {
        for (const auto& line : meta) os << line << '\n';
        body(os);
    });
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual-band RIS satellite QKD simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string output_dir;
    bool no_timestamp = false;
    unsigned threads = 0;
    app.add_option("-c,--config", config_path, "INI configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides run.seed)");
    app.add_option("-o,--output-dir", output_dir, "Output directory (overrides run.output_dir)");
    app.add_flag("--no-timestamp", no_timestamp, "Omit the timestamp header line from outputs");
    app.add_option("-j,--threads", threads, "Worker threads, 0 = all cores");

    double elevation = 45.0;
    std::size_t n = 0;
    std::size_t trial = 0;
    std::string out_path, summary_path, trace_path;

    auto* link = app.add_subcommand("link-budget", "Metrics at one elevation and RIS size");
    link->add_option("--elevation", elevation, "Elevation in degrees")->required();
    link->add_option("--n", n, "RIS elements")->required();
    link->add_option("--trial", trial, "Trial index");

    auto* cal_cmd = app.add_subcommand("calibrate", "Fit calibration constants and report the anchors");

    auto* sweep = app.add_subcommand("sweep", "Elevation sweep over all RIS sizes");
    sweep->add_option("--out", out_path, "CSV path (default <output_dir>/sweep.csv)");

    auto* hist = app.add_subcommand("histogram", "Joint phase histograms per attenuation level");
    hist->add_option("--out", out_path, "CSV path (default <output_dir>/histogram.csv)");
    hist->add_option("--summary", summary_path, "Summary CSV (default <output_dir>/histogram_summary.csv)");

    auto* opt = app.add_subcommand("optimize", "Optimize one scenario and print x* and its metrics");
    opt->add_option("--elevation", elevation, "Elevation in degrees")->required();
    opt->add_option("--n", n, "RIS elements")->required();
    opt->add_option("--trial", trial, "Trial index");
    opt->add_option("--trace", trace_path, "Write the best-so-far trace CSV here");

    auto* qexp = app.add_subcommand("qubo-export", "Write the quadratic model of one scenario");
    qexp->add_option("--elevation", elevation, "Elevation in degrees");
    qexp->add_option("--n", n, "RIS elements")->required();
    qexp->add_option("--out", out_path, "Output path (default <output_dir>/qubo.txt)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    seed_given = seed_opt->count() > 0;

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (seed_given) cfg.seed = seed;
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        cfg.validate();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    Calibration cal;
    try {
        cal = calibrate(cfg);
    } catch (const CalibrationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitCalibration;
    }
    const auto meta = metadata_lines(cfg, cal, !no_timestamp);

    try {
        if (*link || *opt) {
            if (!(elevation > 0.0 && elevation <= 90.0)) {
                err << "error: --elevation must lie in (0, 90]\n";
                return kExitConfig;
            }
            if (n > cfg.ris.n_elements) {
                err << "error: --n exceeds ris.n_elements\n";
                return kExitConfig;
            }
            const Scenario sc = build_scenario(cfg, cal, elevation, n, trial);
            const PointResult r = optimize_point(cfg, cal, sc);
            out << "elevation_deg=" << num(elevation) << '\n' << "n_elements=" << n << '\n';
            out << "slant_range_km=" << num(sc.geometry.slant_range_km) << '\n';
            print_metrics(out, r.metrics);
            out << "feasible=" << (r.feasible ? 1 : 0) << '\n';
            if (*opt) {
                std::string bits;
                for (auto b : r.solver.best_bits) bits.push_back(b ? '1' : '0');
                out << "solver=" << solver_kind_name(cfg.solver.kind) << '\n'
                    << "evaluations=" << r.solver.evaluations << '\n'
                    << "x_star=" << bits << '\n';
                if (!trace_path.empty())
                    write_with_metadata(trace_path, meta, [&](std::ostream& os) { write_trace_csv(os, r.solver); });
                if (!r.feasible) {
                    err << "error: no configuration satisfies QBER <= 0.11\n";
                    return kExitInfeasible;
                }
            }
            return kExitOk;
        }
        if (*cal_cmd) {
            out << "rf_gain_offset_db=" << num(cal.rf_gain_offset_db) << '\n'
                << "reference_power=" << num(cal.reference_power) << '\n'
                << "effective_visibility=" << num(cal.effective_visibility) << '\n'
                << "raw_rate_scale=" << num(cal.raw_rate_scale) << '\n'
                << "element_amp_scale=" << num(cal.element_amp_scale) << '\n'
                << "element_amp_scale_classical=" << num(cal.element_amp_scale_classical) << '\n';
            const auto& a = cfg.anchors;
            for (double e : {a.snr_elevation_deg, a.qber_low_elevation_deg, a.qber_high_elevation_deg, 90.0}) {
                const PointResult r = optimize_point(cfg, cal, build_scenario(cfg, cal, e, 0));
                out << "baseline@" << num(e) << "deg snr_db=" << num(10.0 * std::log10(r.metrics.snr_linear))
                    << " qber=" << num(r.metrics.qber) << " skr_bits_s=" << num(r.metrics.skr_bits_s) << '\n';
            }
            return kExitOk;
        }
        if (*sweep) {
            const auto rows = sweep_elevation(cfg, cal, threads);
            const auto path = resolve_output(cfg, out_path, "sweep.csv");
            write_with_metadata(path, meta, [&](std::ostream& os) { write_sweep_csv(os, rows); });
            std::size_t infeasible = 0;
            for (const auto& r : rows) infeasible += r.feasible ? 0 : 1;
            out << "wrote " << rows.size() << " rows to " << path.string() << '\n';
            if (infeasible) out << infeasible << " rows infeasible (qber > 0.11)\n";
            return kExitOk;
        }
        if (*hist) {
            if (cfg.ris.bits_quantum != 2 || cfg.ris.bits_classical != 2) {
                err << "error: histogram requires 2 bits per band\n";
                return kExitConfig;
            }
            const auto grids = phase_histogram(cfg, cal, cfg.sweep.attenuation_levels);
            const auto path = resolve_output(cfg, out_path, "histogram.csv");
            const auto spath = resolve_output(cfg, summary_path, "histogram_summary.csv");
            write_with_metadata(path, meta, [&](std::ostream& os) { write_histogram_csv(os, grids); });
            write_with_metadata(spath, meta, [&](std::ostream& os) { write_histogram_summary_csv(os, grids); });
            for (const auto& g : grids)
                out << "att=" << num(g.attenuation) << " total=" << g.total() << " chi2=" << num(g.chi2)
                    << " feasible=" << (g.feasible ? 1 : 0) << '\n';
            return kExitOk;
        }
        if (*qexp) {
            if (n > cfg.ris.n_elements) {
                err << "error: --n exceeds ris.n_elements\n";
                return kExitConfig;
            }
            const Scenario sc = build_scenario(cfg, cal, elevation, n);
            const ReceiverModel rx = make_receiver(cfg, cal);
            const Weights w = resolve_weights(cfg.weights, rx.snr(sc.state.direct_classical.power()));
            const QuboModel model = build_qubo(sc.state, rx, w);
            const auto path = resolve_output(cfg, out_path, "qubo.txt");
            write_with_metadata(path, meta, [&](std::ostream& os) { write_qubo(os, model); });
            out << "wrote " << model.dim() << " variables, " << model.interactions().size()
                << " interactions to " << path.string() << '\n';
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace risqkd
