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

#include "risqkd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "risqkd/qubo.hpp"
#include "risqkd/rng.hpp"

namespace risqkd {

SweepSpec::SweepSpec() {
    for (int d = 10; d <= 90; d += 5) elevations_deg.push_back(d);
}

void SweepSpec::validate() const {
    if (elevations_deg.empty() || ris_sizes.empty() || attenuation_levels.empty())
        throw std::invalid_argument("sweep: lists must be non-empty");
    for (double e : elevations_deg)
        if (!(e > 0.0 && e <= 90.0)) throw std::invalid_argument("sweep: elevations must lie in (0, 90]");
    for (double a : attenuation_levels)
        if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("sweep: attenuation levels must lie in (0, 1]");
    if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    if (!(histogram_elevation_deg > 0.0 && histogram_elevation_deg <= 90.0))
        throw std::invalid_argument("sweep: histogram_elevation_deg must lie in (0, 90]");
}

void CalibrationAnchors::validate() const {
    for (double e : {snr_elevation_deg, qber_low_elevation_deg, qber_high_elevation_deg, ris_elevation_deg})
        if (!(e > 0.0 && e <= 90.0)) throw std::invalid_argument("anchors: elevations must lie in (0, 90]");
    if (!(qber_low > 0 && qber_low < kQberSecurityLimit && qber_high > 0 && qber_high < kQberSecurityLimit))
        throw std::invalid_argument("anchors: QBER targets must lie in (0, 0.11)");
    if (!(skr_bits_s > 0)) throw std::invalid_argument("anchors: skr_bits_s must be > 0");
    if (!(ris_skr_gain > 0)) throw std::invalid_argument("anchors: ris_skr_gain must be > 0");
    if (!(ris_snr_gain_db > 0)) throw std::invalid_argument("anchors: ris_snr_gain_db must be > 0");
    if (!(tolerance > 0 && tolerance < 0.1)) throw std::invalid_argument("anchors: tolerance must be in (0, 0.1)");
}

void RunConfig::validate() const {
    try {
        geometry.validate();
        optical.validate();
        rf.validate();
        ris.validate();
        weights.validate();
        solver.validate();
        sweep.validate();
        anchors.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (std::size_t n : sweep.ris_sizes)
        if (n > ris.n_elements)
            throw ConfigError("sweep: ris_sizes entry " + std::to_string(n) + " exceeds ris.n_elements");
    if (anchors.ris_elements > ris.n_elements)
        throw ConfigError("anchors: ris_elements exceeds ris.n_elements");
    if (solver.kind == SolverKind::bcd && solver.objective == ObjectiveKind::quadratic)
        throw ConfigError("solver: bcd requires objective = exact");
    if (solver.kind == SolverKind::brute) {
        const std::size_t per = static_cast<std::size_t>(ris.bits_quantum + ris.bits_classical);
        if (ris.n_elements * per > kBruteForceMaxDim)
            throw ConfigError("solver: brute force is capped at " + std::to_string(kBruteForceMaxDim) +
                              " variables");
    }
}

namespace {

// ---- config parsing -------------------------------------------------------

double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || !std::isfinite(v))
        throw ConfigError("config: '" + key + "' expects a number, got '" + s + "'");
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + s + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

// "a, b, c" or "start:stop:step".
std::vector<double> to_double_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) throw ConfigError("config: '" + key + "' range must be start:stop:step");
        const double a = to_double(key, parts[0]), b = to_double(key, parts[1]), st = to_double(key, parts[2]);
        if (!(st > 0) || b < a) throw ConfigError("config: '" + key + "' range is empty or has step <= 0");
        for (std::size_t k = 0;; ++k) {
            const double v = a + static_cast<double>(k) * st;
            if (v > b + 1e-9 * std::max(1.0, std::abs(b))) break;
            out.push_back(v);
        }
        return out;
    }
    for (const auto& item : split(s, ','))
        if (!item.empty()) out.push_back(to_double(key, item));
    return out;
}

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& item : split(s, ','))
        if (!item.empty()) out.push_back(static_cast<std::size_t>(to_uint(key, item)));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::map<std::string, Setter> make_setters() {
    std::map<std::string, Setter> m;
    auto dbl = [&m](const std::string& key, auto getter) {
        m[key] = [key, getter](RunConfig& c, const std::string& v) { getter(c) = to_double(key, v); };
    };
    auto uint = [&m](const std::string& key, auto getter) {
        m[key] = [key, getter](RunConfig& c, const std::string& v) {
            getter(c) = static_cast<std::remove_reference_t<decltype(getter(c))>>(to_uint(key, v));
        };
    };

#define RISQKD_D(sec, field) dbl(#sec "." #field, [](RunConfig& c) -> auto& { return c.sec.field; })
#define RISQKD_U(sec, field) uint(#sec "." #field, [](RunConfig& c) -> auto& { return c.sec.field; })
    RISQKD_D(geometry, earth_radius_km);
    RISQKD_D(geometry, sat_altitude_km);
    RISQKD_D(geometry, atm_height_km);
    RISQKD_D(geometry, rain_height_km);

    RISQKD_D(optical, wavelength_m);
    RISQKD_D(optical, atten_per_km);
    RISQKD_D(optical, beam_divergence_rad);
    RISQKD_D(optical, rx_aperture_m);
    RISQKD_D(optical, cn2);
    RISQKD_D(optical, rytov_variance);
    RISQKD_D(optical, jitter_rad);
    RISQKD_D(optical, baseline_visibility);
    RISQKD_D(optical, phase_variance);
    RISQKD_D(optical, dark_count_prob);
    RISQKD_D(optical, ec_inefficiency);

    RISQKD_D(rf, wavelength_m);
    RISQKD_D(rf, atten_per_km);
    RISQKD_D(rf, carrier_ghz);
    RISQKD_D(rf, tec_units);
    RISQKD_D(rf, scint_index);
    RISQKD_D(rf, ref_freq_ghz);
    RISQKD_D(rf, rain_rate_mm_h);
    RISQKD_D(rf, rain_k);
    RISQKD_D(rf, rain_alpha);
    RISQKD_D(rf, tx_gain);
    RISQKD_D(rf, rx_gain);
    RISQKD_D(rf, tx_power_w);
    RISQKD_D(rf, sys_temp_k);
    RISQKD_D(rf, bandwidth_hz);

    RISQKD_U(ris, n_elements);
    RISQKD_U(ris, bits_quantum);
    RISQKD_U(ris, bits_classical);
    RISQKD_D(ris, element_gain);
    RISQKD_D(ris, ris_to_ground_km);

    RISQKD_D(weights, qber_threshold);
    RISQKD_D(weights, snr_target);
    RISQKD_D(weights, beta_o);
    m["weights.mode"] = [](RunConfig& c, const std::string& v) {
        if (v == "static") c.weights.mode = WeightMode::static_range;
        else if (v == "swing") c.weights.mode = WeightMode::swing;
        else throw ConfigError("config: 'weights.mode' must be static or swing, got '" + v + "'");
    };

    m["solver.kind"] = [](RunConfig& c, const std::string& v) {
        try {
            c.solver.kind = parse_solver_kind(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: 'solver.kind': ") + e.what());
        }
    };
    m["solver.objective"] = [](RunConfig& c, const std::string& v) {
        try {
            c.solver.objective = parse_objective_kind(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: 'solver.objective': ") + e.what());
        }
    };
    RISQKD_U(solver, max_iters);
    RISQKD_D(solver, initial_temp);
    RISQKD_D(solver, cooling_rate);
    RISQKD_U(solver, tabu_tenure);
    RISQKD_U(solver, restarts);

    m["sweep.elevations_deg"] = [](RunConfig& c, const std::string& v) {
        c.sweep.elevations_deg = to_double_list("sweep.elevations_deg", v);
    };
    m["sweep.ris_sizes"] = [](RunConfig& c, const std::string& v) {
        c.sweep.ris_sizes = to_size_list("sweep.ris_sizes", v);
    };
    m["sweep.attenuation_levels"] = [](RunConfig& c, const std::string& v) {
        c.sweep.attenuation_levels = to_double_list("sweep.attenuation_levels", v);
    };
    RISQKD_U(sweep, trials);
    RISQKD_D(sweep, histogram_elevation_deg);
    m["sweep.fading"] = [](RunConfig& c, const std::string& v) {
        if (v == "mean") c.sweep.fading = FadingMode::mean;
        else if (v == "sampled") c.sweep.fading = FadingMode::sampled;
        else throw ConfigError("config: 'sweep.fading' must be mean or sampled, got '" + v + "'");
    };

    RISQKD_D(anchors, snr_elevation_deg);
    RISQKD_D(anchors, snr_db);
    RISQKD_D(anchors, qber_low_elevation_deg);
    RISQKD_D(anchors, qber_low);
    RISQKD_D(anchors, qber_high_elevation_deg);
    RISQKD_D(anchors, qber_high);
    RISQKD_D(anchors, skr_bits_s);
    RISQKD_U(anchors, ris_elements);
    RISQKD_D(anchors, ris_elevation_deg);
    RISQKD_D(anchors, ris_skr_gain);
    RISQKD_D(anchors, ris_snr_gain_db);
    RISQKD_D(anchors, tolerance);
#undef RISQKD_D
#undef RISQKD_U

    m["run.seed"] = [](RunConfig& c, const std::string& v) { c.seed = to_uint("run.seed", v); };
    m["run.output_dir"] = [](RunConfig& c, const std::string& v) { c.output_dir = v; };
    return m;
}

}  // namespace

RunConfig parse_config(std::istream& is) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    static const auto setters = make_setters();
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("config: key '" + section + "' must live inside a section");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            auto it = setters.find(full);
            if (it == setters.end()) throw ConfigError("config: unknown key '" + full + "'");
            it->second(cfg, trim(value.data()));
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    return parse_config(in);
}

// ---- scenarios ------------------------------------------------------------

namespace {

FadingSample mean_fading(const OpticalParams& optical) { return {1.0, mean_pointing_gain(optical)}; }

double baseline_optical_power(const RunConfig& cfg, double elevation_deg) {
    const LinkGeometry g = make_link_geometry(deg_to_rad(elevation_deg), cfg.geometry);
    return optical_direct_gain(cfg.optical, g, mean_fading(cfg.optical)).power();
}

double baseline_rf_power(const RunConfig& cfg, double elevation_deg) {
    const LinkGeometry g = make_link_geometry(deg_to_rad(elevation_deg), cfg.geometry);
    return rf_direct_gain(cfg.rf, g).power();
}

}  // namespace

Scenario build_scenario(const RunConfig& cfg, const Calibration& cal, double elevation_deg,
                        std::size_t n_elements, std::size_t trial, double attenuation) {
    if (!(attenuation > 0.0 && attenuation <= 1.0))
        throw std::invalid_argument("build_scenario: attenuation must lie in (0, 1]");
    Scenario s;
    s.elevation_deg = elevation_deg;
    s.n_elements = n_elements;
    s.trial = trial;
    s.attenuation = attenuation;
    s.geometry = make_link_geometry(deg_to_rad(elevation_deg), cfg.geometry);
    s.fading = mean_fading(cfg.optical);
    if (cfg.sweep.fading == FadingMode::sampled) {
        const auto seed = derive_seed(cfg.seed, elevation_deg, 0, SeedStream::fading, trial);
        s.fading.turbulence_gain = sample_turbulence(gamma_gamma_shape(cfg.optical.rytov_variance), seed, 1)[0];
    }
    const double amp_att = std::sqrt(attenuation);
    s.state.direct_quantum = optical_direct_gain(cfg.optical, s.geometry, s.fading);
    s.state.direct_quantum.amplitude *= amp_att;
    s.state.direct_classical = rf_direct_gain(cfg.rf, s.geometry);
    s.state.direct_classical.amplitude *= amp_att;

    RisConfig ris = cfg.ris;
    ris.n_elements = n_elements;
    ris.ris_offset_phase_seed = derive_seed(cfg.seed, elevation_deg, n_elements, SeedStream::cascade_quantum, trial);
    s.state.cascade_quantum = cascade_gains(ris, s.geometry, cfg.optical, cal.element_amp_scale * amp_att);
    s.state.cascade_classical = cascade_gains(ris, s.geometry, cfg.rf, cal.element_amp_scale_classical * amp_att);
    s.state.bits_quantum = ris.bits_quantum;
    s.state.bits_classical = ris.bits_classical;
    return s;
}

ReceiverModel make_receiver(const RunConfig& cfg, const Calibration& cal) {
    return ReceiverModel::calibrated(cfg.optical, cfg.rf, cal);
}

PointResult optimize_point(const RunConfig& cfg, const Calibration& cal, const Scenario& sc) {
    const ReceiverModel rx = make_receiver(cfg, cal);
    const double pq0 = sc.state.direct_quantum.power();
    const double pc0 = sc.state.direct_classical.power();
    const Weights w = resolve_weights(cfg.weights, rx.snr(pc0));

    PointResult out;
    out.baseline = rx.evaluate(pq0, pc0, w);
    if (sc.n_elements == 0) {
        out.metrics = out.baseline;
        out.feasible = out.metrics.qber <= kQberSecurityLimit;
        out.solver.best_value = out.metrics.cost;
        out.solver.feasible = out.feasible;
        out.solver.security = out.feasible ? SecurityStatus::accepted : SecurityStatus::infeasible;
        return out;
    }

    const ExactObjective exact(sc.state, rx, w);
    SolverConfig scfg = cfg.solver;
    scfg.seed = derive_seed(cfg.seed, sc.elevation_deg, sc.n_elements, SeedStream::solver, sc.trial);

    SolverResult res;
    if (scfg.objective == ObjectiveKind::exact) {
        res = solve(exact, scfg);
    } else {
        // Re-linearize around each accepted answer; the exact cost arbitrates.
        std::vector<std::uint8_t> x0(exact.dim(), 0);
        double best_exact = 0.0;
        std::size_t evals = 0;
        constexpr int kRounds = 3;
        for (int round = 0; round < kRounds; ++round) {
            const QuboModel model = build_qubo(sc.state, rx, w, x0);
            const QuadraticObjective quad(
                model, [&exact](std::span<const std::uint8_t> x) { return exact.feasible(x); });
            SolverResult r = solve(quad, scfg);
            evals += r.evaluations;
            const double v = exact.evaluate(r.best_bits);
            if (round > 0 && !(v < best_exact)) break;
            r.best_value = v;
            if (r.has_feasible) r.best_feasible_value = exact.evaluate(r.best_feasible_bits);
            best_exact = v;
            x0 = r.best_bits;
            res = std::move(r);
        }
        res.evaluations = evals;
    }
    res = enforce_security(std::move(res), exact);
    out.solver = res;
    out.feasible = res.feasible;
    out.metrics = exact.metrics(res.best_bits);
    return out;
}

// ---- calibration ----------------------------------------------------------

namespace {

// Bisection on log(x) for a function increasing in x; lo/hi must bracket.
double bisect_log(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi / lo - 1.0 > rel_tol; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

// Expands [x/10^k, x·10^k] until f changes sign; f must increase with x.
std::pair<double, double> bracket_increasing(const std::function<double(double)>& f, double x,
                                             const char* what) {
    double lo = x, hi = x;
    for (int k = 0; k < 40 && f(hi) < 0.0; ++k) hi *= 10.0;
    for (int k = 0; k < 40 && f(lo) >= 0.0; ++k) lo /= 10.0;
    if (f(hi) < 0.0 || f(lo) >= 0.0)
        throw CalibrationError(std::string("calibration: could not bracket ") + what);
    return {lo, hi};
}

}  // namespace

Calibration calibrate(const RunConfig& cfg) {
    cfg.validate();
    const CalibrationAnchors& a = cfg.anchors;
    Calibration cal;

    // (1) SNR offset; SNR is linear in the offset, so the fit is closed-form.
    const double snr0 = snr(cfg.rf, ComplexGain{std::sqrt(baseline_rf_power(cfg, a.snr_elevation_deg)), 0.0}, 0.0);
    if (!(snr0 > 0)) throw CalibrationError("calibration: baseline SNR is zero");
    cal.rf_gain_offset_db = a.snr_db - 10.0 * std::log10(snr0);

    // (2) |H_ref|² and V_eff from the two QBER anchors.
    const double p_lo = baseline_optical_power(cfg, a.qber_low_elevation_deg);
    const double p_hi = baseline_optical_power(cfg, a.qber_high_elevation_deg);
    const double pd = cfg.optical.dark_count_prob;
    const double s_lo = 1.0 - 2.0 * (a.qber_low - pd);   // V·h at the low anchor
    const double s_hi = 1.0 - 2.0 * (a.qber_high - pd);
    const double target_ratio = s_lo / s_hi;
    if (!(p_lo > 0 && p_hi > 0) || !(p_lo / p_hi < target_ratio && target_ratio < 1.0))
        throw CalibrationError("calibration: QBER anchors are not reachable by the signal-fraction model "
                               "(power ratio " + std::to_string(p_lo / p_hi) + ", required ratio " +
                               std::to_string(target_ratio) + ")");
    // Ratio h_lo/h_hi falls from 1 to p_lo/p_hi as |H_ref|² grows.
    auto ratio_gap = [&](double ref) {
        return target_ratio - signal_fraction(p_lo, ref) / signal_fraction(p_hi, ref);
    };
    const auto [rlo, rhi] = bracket_increasing(ratio_gap, p_hi, "reference power");
    cal.reference_power = bisect_log(ratio_gap, rlo, rhi, 1e-13);
    cal.effective_visibility = s_hi / signal_fraction(p_hi, cal.reference_power);
    if (!(cal.effective_visibility > 0 && cal.effective_visibility <= 1.0))
        throw CalibrationError("calibration: fitted visibility " + std::to_string(cal.effective_visibility) +
                               " is outside (0, 1]");

    // (3) Raw-rate scale; SKR is linear in it.
    {
        const ReceiverModel rx = make_receiver(cfg, cal);
        const double per_unit = skr_unclamped(p_hi / cal.reference_power, rx.qber(p_hi), cfg.optical.ec_inefficiency);
        if (!(per_unit > 0)) throw CalibrationError("calibration: SKR anchor lies beyond the QBER limit");
        cal.raw_rate_scale = a.skr_bits_s / per_unit;
    }

    if (a.ris_elements == 0) return cal;

    // (4) Quantum element amplitude from the optimized SKR gain.
    auto skr_gap = [&](double scale) {
        Calibration c = cal;
        c.element_amp_scale = scale;
        const Scenario sc = build_scenario(cfg, c, a.ris_elevation_deg, a.ris_elements);
        const PointResult r = optimize_point(cfg, c, sc);
        return r.metrics.skr_bits_s / r.baseline.skr_bits_s - 1.0 - a.ris_skr_gain;
    };
    {
        const auto [lo, hi] = bracket_increasing(skr_gap, 1.0, "quantum element amplitude");
        cal.element_amp_scale = bisect_log(skr_gap, lo, hi, a.tolerance);
    }

    // (5) Classical element amplitude from the optimized SNR gain.
    auto snr_gap = [&](double scale) {
        Calibration c = cal;
        c.element_amp_scale_classical = scale;
        const Scenario sc = build_scenario(cfg, c, a.ris_elevation_deg, a.ris_elements);
        const PointResult r = optimize_point(cfg, c, sc);
        return 10.0 * std::log10(r.metrics.snr_linear / r.baseline.snr_linear) - a.ris_snr_gain_db;
    };
    {
        const auto [lo, hi] = bracket_increasing(snr_gap, 1.0, "classical element amplitude");
        cal.element_amp_scale_classical = bisect_log(snr_gap, lo, hi, a.tolerance);
    }
    return cal;
}

// ---- sweeps ---------------------------------------------------------------

namespace {

template <class Task>
void run_parallel(std::size_t count, unsigned threads, Task&& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<SweepRow> sweep_elevation(const RunConfig& cfg, const Calibration& cal, unsigned threads) {
    struct Task {
        double elevation;
        std::size_t n;
        std::size_t trial;
    };
    std::vector<Task> tasks;
    for (double e : cfg.sweep.elevations_deg)
        for (std::size_t n : cfg.sweep.ris_sizes)
            for (std::size_t t = 0; t < cfg.sweep.trials; ++t) tasks.push_back({e, n, t});

    std::vector<SweepRow> rows(tasks.size());
    run_parallel(tasks.size(), threads, [&](std::size_t i) {
        const Task& t = tasks[i];
        const Scenario sc = build_scenario(cfg, cal, t.elevation, t.n, t.trial);
        const PointResult r = optimize_point(cfg, cal, sc);
        SweepRow& row = rows[i];
        row.elevation_deg = t.elevation;
        row.n_elements = t.n;
        row.trial = t.trial;
        row.snr_db = 10.0 * std::log10(r.metrics.snr_linear);
        row.ber = r.metrics.ber;
        row.qber = r.metrics.qber;
        row.skr_bits_s = r.metrics.skr_bits_s;
        row.cost = r.metrics.cost;
        row.feasible = r.feasible;
        row.solver_evals = r.solver.evaluations;
    });
    delta_metrics(rows);
    return rows;
}

void delta_metrics(std::vector<SweepRow>& rows) {
    std::map<std::pair<double, std::size_t>, const SweepRow*> base;
    for (const auto& r : rows)
        if (r.n_elements == 0) base[{r.elevation_deg, r.trial}] = &r;
    for (auto& r : rows) {
        auto it = base.find({r.elevation_deg, r.trial});
        if (it == base.end())
            throw std::logic_error("delta_metrics: no N=0 row for elevation " + std::to_string(r.elevation_deg) +
                                   ", trial " + std::to_string(r.trial));
        r.delta_snr_db = r.snr_db - it->second->snr_db;
        r.delta_qber_pp = 100.0 * (it->second->qber - r.qber);
    }
}

std::size_t HistogramGrid::total() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

double chi2_uniform(const std::vector<std::size_t>& counts) {
    if (counts.empty()) return 0.0;
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    if (total == 0.0) return 0.0;
    const double expected = total / static_cast<double>(counts.size());
    double chi2 = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

std::vector<HistogramGrid> phase_histogram(const RunConfig& cfg, const Calibration& cal,
                                           const std::vector<double>& att_levels) {
    if (cfg.ris.bits_quantum != 2 || cfg.ris.bits_classical != 2)
        throw std::invalid_argument("phase_histogram: requires 2 bits per band");
    std::vector<HistogramGrid> grids(att_levels.size());
    run_parallel(att_levels.size(), 0, [&](std::size_t i) {
        const Scenario sc = build_scenario(cfg, cal, cfg.sweep.histogram_elevation_deg, cfg.ris.n_elements, 0,
                                           att_levels[i]);
        const PointResult r = optimize_point(cfg, cal, sc);
        HistogramGrid& g = grids[i];
        g.attenuation = att_levels[i];
        g.counts.assign(g.levels_quantum * g.levels_classical, 0);
        g.feasible = r.feasible;
        g.qber = r.metrics.qber;
        if (r.feasible) {
            const BitLayout layout = sc.state.layout();
            for (std::size_t e = 0; e < sc.n_elements; ++e) {
                const auto lq = layout.level(r.solver.best_bits, e, Band::quantum);
                const auto lc = layout.level(r.solver.best_bits, e, Band::classical);
                ++g.counts[lq * g.levels_classical + lc];
            }
        }
        g.chi2 = chi2_uniform(g.counts);
    });
    return grids;
}

// ---- output ---------------------------------------------------------------

namespace {

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

std::vector<std::string> metadata_lines(const RunConfig& cfg, const Calibration& cal, bool with_timestamp) {
    std::vector<std::string> lines;
    lines.push_back(std::string("# risqkd ") + kVersion);
    lines.push_back("# seed=" + std::to_string(cfg.seed) + " rng=" + std::string(kRngName) +
                    " solver=" + solver_kind_name(cfg.solver.kind) +
                    " objective=" + objective_kind_name(cfg.solver.objective) +
                    " fading=" + (cfg.sweep.fading == FadingMode::mean ? "mean" : "sampled") +
                    " weights=" + (cfg.weights.mode == WeightMode::swing ? "swing" : "static"));
    lines.push_back("# calibration rf_gain_offset_db=" + fmt(cal.rf_gain_offset_db, "%.17g") +
                    " reference_power=" + fmt(cal.reference_power, "%.17g") +
                    " effective_visibility=" + fmt(cal.effective_visibility, "%.17g") +
                    " raw_rate_scale=" + fmt(cal.raw_rate_scale, "%.17g") +
                    " element_amp_scale=" + fmt(cal.element_amp_scale, "%.17g") +
                    " element_amp_scale_classical=" + fmt(cal.element_amp_scale_classical, "%.17g"));
    if (with_timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        lines.push_back(std::string("# generated=") + buf);
    }
    return lines;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepColumns << '\n';
    for (const auto& r : rows) {
        os << fmt(r.elevation_deg) << ',' << r.n_elements << ',' << r.trial << ',' << fmt(r.snr_db) << ','
           << fmt(r.ber) << ',' << fmt(r.qber) << ',' << fmt(r.skr_bits_s) << ',' << fmt(r.cost) << ','
           << (r.feasible ? 1 : 0) << ',' << r.solver_evals << ',' << fmt(r.delta_snr_db) << ','
           << fmt(r.delta_qber_pp) << '\n';
    }
}

void write_histogram_csv(std::ostream& os, const std::vector<HistogramGrid>& grids) {
    os << kHistogramColumns << '\n';
    for (const auto& g : grids)
        for (std::size_t q = 0; q < g.levels_quantum; ++q)
            for (std::size_t c = 0; c < g.levels_classical; ++c)
                os << fmt(g.attenuation) << ',' << q << ',' << c << ',' << g.count(q, c) << '\n';
}

void write_histogram_summary_csv(std::ostream& os, const std::vector<HistogramGrid>& grids) {
    os << kHistogramSummaryColumns << '\n';
    for (const auto& g : grids)
        os << fmt(g.attenuation) << ',' << g.total() << ',' << fmt(g.chi2) << ',' << (g.feasible ? 1 : 0) << ','
           << fmt(g.qber) << '\n';
}

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
            body(out);
            out.flush();
            if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

}  // namespace risqkd
