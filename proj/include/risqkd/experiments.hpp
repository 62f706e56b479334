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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "risqkd/channels.hpp"
#include "risqkd/geometry.hpp"
#include "risqkd/metrics.hpp"
#include "risqkd/ris.hpp"
#include "risqkd/solvers.hpp"

namespace risqkd {

inline constexpr const char* kVersion = "0.3.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FadingMode { mean, sampled };

struct SweepSpec {
    std::vector<double> elevations_deg;
    std::vector<std::size_t> ris_sizes{0, 128, 265, 512};
    std::vector<double> attenuation_levels{1.0, 0.6, 0.3, 0.1};
    std::size_t trials = 1;
    double histogram_elevation_deg = 45.0;
    FadingMode fading = FadingMode::mean;

    SweepSpec();
    void validate() const;
};

/// Targets of the calibration fits.
struct CalibrationAnchors {
    double snr_elevation_deg = 10.0;
    double snr_db = 11.0;
    double qber_low_elevation_deg = 20.0;
    double qber_low = 0.012;
    double qber_high_elevation_deg = 80.0;
    double qber_high = 0.009;
    double skr_bits_s = 3500.0;  // at qber_high_elevation_deg
    std::size_t ris_elements = 512;
    double ris_elevation_deg = 80.0;
    double ris_skr_gain = 1.02;         // fractional SKR gain of the optimized RIS
    double ris_snr_gain_db = 1.1;       // ΔSNR of the optimized RIS
    double tolerance = 1e-6;            // bisection, relative

    void validate() const;
};

struct RunConfig {
    GeometryParams geometry;
    OpticalParams optical;
    RfParams rf;
    RisConfig ris;
    CostWeights weights;
    SolverConfig solver;
    SweepSpec sweep;
    CalibrationAnchors anchors;
    std::uint64_t seed = 42;
    std::string output_dir = ".";

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// Parses an INI-style file with sections geometry, optical, rf, ris,
/// weights, solver, sweep, anchors and run. Unknown sections or keys and
/// malformed values raise ConfigError; absent keys keep their defaults.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::istream& is);

/// Single (θ, N) operating point with its channel state.
struct Scenario {
    double elevation_deg = 0.0;
    std::size_t n_elements = 0;
    std::size_t trial = 0;
    double attenuation = 1.0;
    LinkGeometry geometry;
    FadingSample fading;
    ChannelState state;
};

/// Deterministic losses (not the fading draw) are scaled by `attenuation`.
/// Cascade offsets and fading draws come from derive_seed(cfg.seed, θ, ·).
Scenario build_scenario(const RunConfig& cfg, const Calibration& cal, double elevation_deg,
                        std::size_t n_elements, std::size_t trial = 0, double attenuation = 1.0);

/// Runs the calibration fits in order: SNR offset, |H_ref|² and V_eff,
/// raw-rate scale, quantum element amplitude, classical element amplitude.
/// Throws CalibrationError when a fit does not bracket.
Calibration calibrate(const RunConfig& cfg);

ReceiverModel make_receiver(const RunConfig& cfg, const Calibration& cal);

struct PointResult {
    Metrics metrics;
    Metrics baseline;  // same point without RIS
    SolverResult solver;
    bool feasible = false;
};

/// Weights follow cfg.weights.mode with the swing form anchored at the
/// baseline SNR of the same point. N=0 needs no solver.
PointResult optimize_point(const RunConfig& cfg, const Calibration& cal, const Scenario& scenario);

struct SweepRow {
    double elevation_deg = 0.0;
    std::size_t n_elements = 0;
    std::size_t trial = 0;
    double snr_db = 0.0;
    double ber = 0.0;
    double qber = 0.0;
    double skr_bits_s = 0.0;
    double cost = 0.0;
    bool feasible = false;
    std::size_t solver_evals = 0;
    double delta_snr_db = 0.0;
    double delta_qber_pp = 0.0;
};

/// One row per (θ, N, trial) in elevation-major order; points run on `threads`
/// workers (0: hardware concurrency) and are assembled order-stably.
std::vector<SweepRow> sweep_elevation(const RunConfig& cfg, const Calibration& cal,
                                      unsigned threads = 0);

/// Fills ΔSNR (dB) and ΔQBER (percentage points) against the N=0 row of the
/// same (θ, trial). Throws std::logic_error when that row is missing.
void delta_metrics(std::vector<SweepRow>& rows);

struct HistogramGrid {
    double attenuation = 1.0;
    std::size_t levels_quantum = 4;
    std::size_t levels_classical = 4;
    std::vector<std::size_t> counts;  // [level_q * levels_classical + level_c]
    double chi2 = 0.0;                // against the uniform grid
    bool feasible = false;
    double qber = 0.0;

    std::size_t total() const;
    std::size_t count(std::size_t level_q, std::size_t level_c) const {
        return counts[level_q * levels_classical + level_c];
    }
};

/// Joint (θ_Q, θ_C) level counts of the optimized RIS at the histogram
/// elevation, one grid per attenuation level. Requires 2 bits per band.
/// Infeasible optimizations contribute an empty grid.
std::vector<HistogramGrid> phase_histogram(const RunConfig& cfg, const Calibration& cal,
                                           const std::vector<double>& att_levels);

double chi2_uniform(const std::vector<std::size_t>& counts);

/// Metadata written as '#' comment lines at the top of every CSV.
std::vector<std::string> metadata_lines(const RunConfig& cfg, const Calibration& cal,
                                        bool with_timestamp);

inline constexpr const char* kSweepColumns =
    "elevation_deg,n_elements,trial,snr_db,ber,qber,skr_bits_s,cost,feasible,solver_evals,"
    "delta_snr_db,delta_qber_pp";
inline constexpr const char* kHistogramColumns =
    "attenuation,level_quantum,level_classical,count";
inline constexpr const char* kHistogramSummaryColumns = "attenuation,n_elements,chi2,feasible,qber";

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_histogram_csv(std::ostream& os, const std::vector<HistogramGrid>& grids);
void write_histogram_summary_csv(std::ostream& os, const std::vector<HistogramGrid>& grids);

/// Writes to a sibling temporary file and renames it over `path`, so a
/// failed run never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& body);

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCalibration = 3;
inline constexpr int kExitInfeasible = 4;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace risqkd
