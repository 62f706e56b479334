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

#include <complex>
#include <cstdint>
#include <vector>

#include "risqkd/geometry.hpp"

namespace risqkd {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

/// Quantum (optical, 850 nm) link parameters.
struct OpticalParams {
    double wavelength_m = 850e-9;
    double atten_per_km = 0.046;        // κ_Q, linear (per km)
    double beam_divergence_rad = 10e-6;
    double rx_aperture_m = 0.3;
    double cn2 = 5e-14;                 // m^-2/3, kept as metadata
    double rytov_variance = 0.5;
    double jitter_rad = 2e-6;
    double baseline_visibility = 0.94;  // V0
    double phase_variance = 1.03;       // σ_φ²
    double dark_count_prob = 1e-6;
    double ec_inefficiency = 1.1;       // f_EC

    void validate() const;
};

/// Classical S-band link parameters. Antenna gains are linear.
struct RfParams {
    double wavelength_m = 0.15;
    double atten_per_km = 0.0046;  // κ_C
    double carrier_ghz = 2.3;
    double tec_units = 10.0;
    double scint_index = 0.3;      // S4
    double ref_freq_ghz = 1.0;
    double rain_rate_mm_h = 10.0;
    double rain_k = 3e-4;
    double rain_alpha = 1.1;
    double tx_gain = 4.0;
    double rx_gain = 1000.0;
    double tx_power_w = 10.0;
    double sys_temp_k = 290.0;
    double bandwidth_hz = 1e8;

    void validate() const;
};

struct FadingSample {
    double turbulence_gain = 1.0;  // χ
    double pointing_gain = 1.0;    // h_pe
};

/// Polar complex gain; phase kept in [0, 2π).
struct ComplexGain {
    double amplitude = 0.0;
    double phase_rad = 0.0;

    static ComplexGain polar(double amplitude, double phase_rad);
    static ComplexGain from_complex(std::complex<double> z);
    std::complex<double> value() const { return std::polar(amplitude, phase_rad); }
    double power() const { return amplitude * amplitude; }
};

/// Wraps any finite angle into [0, 2π).
double wrap_phase(double phase_rad);

/// 2πd/λ mod 2π, computed from the fractional wavelength count so that
/// large d/λ keeps as many significant bits as possible.
double propagation_phase(double distance_m, double wavelength_m);

/// λ/(4πd), the free-space amplitude factor.
double friis_amplitude(double distance_m, double wavelength_m);

double optical_tx_gain(const OpticalParams& params);
double optical_rx_gain(const OpticalParams& params);
ComplexGain optical_direct_gain(const OpticalParams& params, const LinkGeometry& geom,
                                const FadingSample& fading);

/// Amplitude factor exp(-κ_Q d_atm / 2) applied to the optical path.
double optical_atmospheric_amplitude(const OpticalParams& params, const LinkGeometry& geom);

double ionospheric_loss(const RfParams& params);
double rain_loss(const RfParams& params, const LinkGeometry& geom);
double rf_atmospheric_loss(const RfParams& params, const LinkGeometry& geom);

/// sqrt(L_atm · L_ion · L_rain): the amplitude factor of all RF impairments.
double rf_impairment_amplitude(const RfParams& params, const LinkGeometry& geom);
ComplexGain rf_direct_gain(const RfParams& params, const LinkGeometry& geom);

struct GammaGammaShape {
    double alpha = 0.0;
    double beta = 0.0;
    /// Zero Rytov variance: both shapes infinite, χ ≡ 1.
    bool degenerate() const;
};

GammaGammaShape gamma_gamma_shape(double rytov_variance);

/// Unit-mean Gamma-Gamma draws: Gamma(α, 1/α) · Gamma(β, 1/β).
/// Identical output for identical (shape, seed, count).
std::vector<double> sample_turbulence(const GammaGammaShape& shape, std::uint64_t seed,
                                      std::size_t count);

/// Mean pointing loss 1 / (1 + 2σ_j²/θ_div²).
double mean_pointing_gain(const OpticalParams& params);

}  // namespace risqkd
