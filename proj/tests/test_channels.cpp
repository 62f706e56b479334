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

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "risqkd/channels.hpp"

using namespace risqkd;

TEST_SUITE("channels") {

TEST_CASE("optical antenna gains") {
    OpticalParams p;
    CHECK(optical_tx_gain(p) == doctest::Approx(1.2566370614e11).epsilon(1e-9));
    p.beam_divergence_rad = 2.0;
    CHECK(optical_tx_gain(p) == doctest::Approx(kPi));
    p.beam_divergence_rad = 20e-6;
    CHECK(optical_tx_gain(p) == doctest::Approx(3.1415926536e10).epsilon(1e-9));
    p.beam_divergence_rad = 0.0;
    CHECK_THROWS_AS(optical_tx_gain(p), std::domain_error);

    p = {};
    CHECK(optical_rx_gain(p) == doctest::Approx(3.9134026135e11).epsilon(1e-9));
    p.rx_aperture_m = 0.6;
    CHECK(optical_rx_gain(p) == doctest::Approx(4 * 3.9134026135e11).epsilon(1e-9));
    p.rx_aperture_m = p.wavelength_m / std::sqrt(kPi);
    CHECK(optical_rx_gain(p) == doctest::Approx(1.0));
}

TEST_CASE("optical direct gain") {
    OpticalParams p;
    p.atten_per_km = 0.0;
    LinkGeometry g{deg_to_rad(90), 500.0, 5.0, 1.5};
    const auto h = optical_direct_gain(p, g, {1.0, 1.0});
    CHECK(h.amplitude == doctest::Approx(0.0300).epsilon(1e-6));
    CHECK(10 * std::log10(h.power()) == doctest::Approx(-30.46).epsilon(1e-3));
    CHECK(h.phase_rad >= 0.0);
    CHECK(h.phase_rad < kTwoPi);
    CHECK(optical_direct_gain(p, g, {0.0, 1.0}).amplitude == 0.0);
    p.atten_per_km = 0.046;
    CHECK(optical_atmospheric_amplitude(p, g) == doctest::Approx(std::exp(-0.115)));
    CHECK(optical_atmospheric_amplitude(p, g) == doctest::Approx(0.8914).epsilon(1e-4));
}

TEST_CASE("ionospheric and rain losses") {
    RfParams p;
    p.tec_units = 0;
    p.scint_index = 0;
    CHECK(ionospheric_loss(p) == 1.0);
    p = {};
    CHECK(ionospheric_loss(p) == doctest::Approx(0.98817926569).epsilon(1e-10));
    p.tec_units = 50;
    p.scint_index = 0.5;
    p.carrier_ghz = 2.0;
    CHECK(ionospheric_loss(p) == doctest::Approx(0.92588447485).epsilon(1e-10));

    LinkGeometry g{deg_to_rad(10), 1500, 28, 8.52};
    p = {};
    p.rain_rate_mm_h = 0;
    CHECK(rain_loss(p, g) == 1.0);
    p.rain_k = 5e-4;
    p.rain_alpha = 1.2;
    p.rain_rate_mm_h = 25;
    CHECK(rain_loss(p, g) == doctest::Approx(0.81649119989).epsilon(1e-10));
    p.rain_k = 1e-4;
    p.rain_alpha = 1.0;
    p.rain_rate_mm_h = 10;
    g.rain_path_km = 1.5;
    CHECK(rain_loss(p, g) == doctest::Approx(0.99850112444).epsilon(1e-10));
}

TEST_CASE("rf direct gain") {
    RfParams p;
    p.atten_per_km = 0;
    p.tec_units = 0;
    p.scint_index = 0;
    p.rain_rate_mm_h = 0;
    p.tx_gain = 1;
    p.rx_gain = 1;
    LinkGeometry g{deg_to_rad(90), p.wavelength_m / (4 * kPi) * 1e-3, 5.0, 1.5};
    CHECK(rf_direct_gain(p, g).amplitude == doctest::Approx(1.0).epsilon(1e-12));
    g.slant_range_km = 500;
    CHECK(rf_direct_gain(p, g).amplitude == doctest::Approx(2.3873241464e-8).epsilon(1e-9));
    CHECK(10 * std::log10(rf_direct_gain(p, g).power()) == doctest::Approx(-152.4418).epsilon(1e-6));
    // 1/d² scaling with losses disabled.
    const double p500 = rf_direct_gain(p, g).power();
    g.slant_range_km = 1000;
    CHECK(rf_direct_gain(p, g).power() == doctest::Approx(p500 / 4).epsilon(1e-12));

    p = {};
    p.atten_per_km = 0.0046;
    CHECK(rf_atmospheric_loss(p, {0, 500, 5.0, 0}) == doctest::Approx(0.9773).epsilon(1e-4));
}

TEST_CASE("loss factors lie in (0, 1]") {
    OpticalParams o;
    RfParams r;
    GeometryParams geo;
    for (int d = 5; d <= 90; d += 5) {
        const auto g = make_link_geometry(deg_to_rad(d), geo);
        for (double v : {optical_atmospheric_amplitude(o, g), ionospheric_loss(r), rain_loss(r, g),
                         rf_atmospheric_loss(r, g)}) {
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("optical amplitude grows with elevation at fixed fading") {
    OpticalParams o;
    GeometryParams geo;
    double prev = 0;
    for (int d = 1; d <= 90; ++d) {
        const double a = optical_direct_gain(o, make_link_geometry(deg_to_rad(d), geo), {1.0, 0.9}).amplitude;
        CHECK(a >= prev);
        prev = a;
    }
}

TEST_CASE("gamma-gamma shapes") {
    const auto s1 = gamma_gamma_shape(1.0);
    CHECK(s1.alpha == doctest::Approx(4.3938590254).epsilon(1e-9));
    CHECK(s1.beta == doctest::Approx(2.5636319795).epsilon(1e-9));
    const auto s05 = gamma_gamma_shape(0.5);
    CHECK(s05.alpha == doctest::Approx(5.9776353290).epsilon(1e-9));
    CHECK(s05.beta == doctest::Approx(4.3980435063).epsilon(1e-9));
    CHECK(gamma_gamma_shape(0.0).degenerate());
    CHECK_THROWS(gamma_gamma_shape(-0.1));
}

TEST_CASE("turbulence sampling") {
    const auto none = sample_turbulence(gamma_gamma_shape(0.0), 7, 5);
    for (double v : none) CHECK(v == 1.0);
    CHECK(sample_turbulence(gamma_gamma_shape(1.0), 11, 2) == sample_turbulence(gamma_gamma_shape(1.0), 11, 2));
    CHECK(sample_turbulence(gamma_gamma_shape(1.0), 11, 2) != sample_turbulence(gamma_gamma_shape(1.0), 12, 2));
    for (double s2 : {0.2, 0.5, 1.0, 3.0}) {
        const auto xs = sample_turbulence(gamma_gamma_shape(s2), 2024, 100000);
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
        for (double v : xs) REQUIRE(v >= 0.0);
    }
}

TEST_CASE("mean pointing gain") {
    OpticalParams p;
    CHECK(mean_pointing_gain(p) == doctest::Approx(1 / 1.08));
    CHECK(mean_pointing_gain(p) == doctest::Approx(0.926).epsilon(1e-3));
    p.jitter_rad = 0;
    CHECK(mean_pointing_gain(p) == 1.0);
    p.jitter_rad = p.beam_divergence_rad;
    CHECK(mean_pointing_gain(p) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("parameter validation") {
    RfParams r;
    r.carrier_ghz = 1.999;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    OpticalParams o;
    o.baseline_visibility = 1.2;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = {};
    o.ec_inefficiency = 0.9;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("complex gain phase normalization") {
    CHECK(wrap_phase(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(wrap_phase(3 * kTwoPi + 0.25) == doctest::Approx(0.25));
    const auto g = ComplexGain::polar(2.0, -kPi / 2);
    CHECK(g.phase_rad == doctest::Approx(1.5 * kPi));
    const auto z = ComplexGain::from_complex({0.0, -3.0});
    CHECK(z.amplitude == doctest::Approx(3.0));
    CHECK(z.phase_rad == doctest::Approx(1.5 * kPi));
}

}
