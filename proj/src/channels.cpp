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

#include "risqkd/channels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/random/gamma_distribution.hpp>

#include "risqkd/rng.hpp"

namespace risqkd {

void OpticalParams::validate() const {
    if (!(wavelength_m > 0)) throw std::invalid_argument("optical: wavelength_m must be > 0");
    if (!(atten_per_km >= 0)) throw std::invalid_argument("optical: atten_per_km must be >= 0");
    if (!(beam_divergence_rad > 0))
        throw std::invalid_argument("optical: beam_divergence_rad must be > 0");
    if (!(rx_aperture_m > 0)) throw std::invalid_argument("optical: rx_aperture_m must be > 0");
    if (!(rytov_variance >= 0)) throw std::invalid_argument("optical: rytov_variance must be >= 0");
    if (!(jitter_rad >= 0)) throw std::invalid_argument("optical: jitter_rad must be >= 0");
    if (!(baseline_visibility > 0 && baseline_visibility <= 1))
        throw std::invalid_argument("optical: baseline_visibility must be in (0, 1]");
    if (!(phase_variance >= 0)) throw std::invalid_argument("optical: phase_variance must be >= 0");
    if (!(dark_count_prob >= 0 && dark_count_prob <= 1e-3))
        throw std::invalid_argument("optical: dark_count_prob must be in [0, 1e-3]");
    if (!(ec_inefficiency >= 1)) throw std::invalid_argument("optical: ec_inefficiency must be >= 1");
}

void RfParams::validate() const {
    const double positive[] = {wavelength_m, carrier_ghz, ref_freq_ghz, rain_k, rain_alpha,
                               tx_gain,      rx_gain,     tx_power_w,   sys_temp_k, bandwidth_hz};
    for (double v : positive) {
        if (!(v > 0)) throw std::invalid_argument("rf: gains, powers and model constants must be > 0");
    }
    if (!(atten_per_km >= 0) || !(tec_units >= 0) || !(scint_index >= 0) || !(rain_rate_mm_h >= 0))
        throw std::invalid_argument("rf: attenuation, TEC, S4 and rain rate must be >= 0");
    if (carrier_ghz < 2.0 || carrier_ghz > 4.0)
        throw std::invalid_argument("rf: carrier_ghz must lie in the S-band [2, 4] GHz");
}

double wrap_phase(double phase_rad) {
    double r = std::fmod(phase_rad, kTwoPi);
    if (r < 0) r += kTwoPi;
    // fmod of a tiny negative value can round up to exactly 2π.
    if (r >= kTwoPi) r = 0.0;
    return r;
}

ComplexGain ComplexGain::polar(double amplitude, double phase_rad) {
    if (amplitude < 0) return {-amplitude, wrap_phase(phase_rad + kPi)};
    return {amplitude, wrap_phase(phase_rad)};
}

ComplexGain ComplexGain::from_complex(std::complex<double> z) {
    const double a = std::abs(z);
    return {a, a > 0 ? wrap_phase(std::arg(z)) : 0.0};
}

double propagation_phase(double distance_m, double wavelength_m) {
    const double cycles = distance_m / wavelength_m;
    return wrap_phase(kTwoPi * (cycles - std::floor(cycles)));
}

double friis_amplitude(double distance_m, double wavelength_m) {
    return wavelength_m / (4.0 * kPi * distance_m);
}

double optical_tx_gain(const OpticalParams& params) {
    if (!(params.beam_divergence_rad > 0))
        throw std::domain_error("optical_tx_gain: beam divergence must be > 0");
    return 4.0 * kPi / (params.beam_divergence_rad * params.beam_divergence_rad);
}

double optical_rx_gain(const OpticalParams& params) {
    const double ratio = params.rx_aperture_m / params.wavelength_m;
    return kPi * ratio * ratio;
}

double optical_atmospheric_amplitude(const OpticalParams& params, const LinkGeometry& geom) {
    return std::exp(-params.atten_per_km * geom.atm_path_km / 2.0);
}

ComplexGain optical_direct_gain(const OpticalParams& params, const LinkGeometry& geom,
                                const FadingSample& fading) {
    const double d_m = geom.slant_range_km * 1e3;
    const double amp = friis_amplitude(d_m, params.wavelength_m) *
                       std::sqrt(optical_tx_gain(params) * optical_rx_gain(params)) *
                       optical_atmospheric_amplitude(params, geom) *
                       std::sqrt(fading.turbulence_gain * fading.pointing_gain);
    return {amp, propagation_phase(d_m, params.wavelength_m)};
}

double ionospheric_loss(const RfParams& params) {
    const double f = params.carrier_ghz;
    const double i_ion = 0.0265 * params.tec_units / (f * f) +
                         0.018 * params.scint_index * std::pow(params.ref_freq_ghz, 1.5) /
                             std::pow(f, 1.5);
    return std::pow(10.0, -i_ion / 10.0);
}

double rain_loss(const RfParams& params, const LinkGeometry& geom) {
    if (params.rain_rate_mm_h <= 0) return 1.0;
    const double gamma_r = params.rain_k * std::pow(params.rain_rate_mm_h, params.rain_alpha);
    return std::exp(-gamma_r * geom.rain_path_km);
}

double rf_atmospheric_loss(const RfParams& params, const LinkGeometry& geom) {
    return std::exp(-params.atten_per_km * geom.atm_path_km);
}

double rf_impairment_amplitude(const RfParams& params, const LinkGeometry& geom) {
    return std::sqrt(rf_atmospheric_loss(params, geom) * ionospheric_loss(params) *
                     rain_loss(params, geom));
}

ComplexGain rf_direct_gain(const RfParams& params, const LinkGeometry& geom) {
    const double d_m = geom.slant_range_km * 1e3;
    const double amp = friis_amplitude(d_m, params.wavelength_m) *
                       std::sqrt(params.tx_gain * params.rx_gain) *
                       rf_impairment_amplitude(params, geom);
    return {amp, propagation_phase(d_m, params.wavelength_m)};
}

bool GammaGammaShape::degenerate() const { return std::isinf(alpha) || std::isinf(beta); }

GammaGammaShape gamma_gamma_shape(double rytov_variance) {
    if (!(rytov_variance >= 0))
        throw std::domain_error("gamma_gamma_shape: Rytov variance must be >= 0");
    if (rytov_variance == 0) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    const double s2 = rytov_variance;
    const double s125 = std::pow(s2, 6.0 / 5.0);  // σ^{12/5} with σ² = s2
    const double a = 1.0 / std::expm1(0.49 * s2 / std::pow(1.0 + 1.11 * s125, 7.0 / 6.0));
    const double b = 1.0 / std::expm1(0.51 * s2 / std::pow(1.0 + 0.69 * s125, 5.0 / 6.0));
    return {a, b};
}

std::vector<double> sample_turbulence(const GammaGammaShape& shape, std::uint64_t seed,
                                      std::size_t count) {
    std::vector<double> out(count, 1.0);
    if (shape.degenerate() || count == 0) return out;
    if (!(shape.alpha > 0 && shape.beta > 0))
        throw std::domain_error("sample_turbulence: shape parameters must be > 0");
    Rng rng(seed);
    boost::random::gamma_distribution<double> large(shape.alpha, 1.0 / shape.alpha);
    boost::random::gamma_distribution<double> small(shape.beta, 1.0 / shape.beta);
    for (auto& chi : out) {
        const double x = large(rng);
        const double y = small(rng);
        chi = x * y;
    }
    return out;
}

double mean_pointing_gain(const OpticalParams& params) {
    if (!(params.beam_divergence_rad > 0))
        throw std::domain_error("mean_pointing_gain: beam divergence must be > 0");
    const double r = params.jitter_rad / params.beam_divergence_rad;
    return 1.0 / (1.0 + 2.0 * r * r);
}

}  // namespace risqkd
