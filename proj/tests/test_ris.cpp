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
#include <complex>
#include <set>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "risqkd/ris.hpp"
#include "risqkd/rng.hpp"

using namespace risqkd;

namespace {

ChannelState random_state(std::uint64_t seed, std::size_t n, int bq = 2, int bc = 2) {
    Rng rng(seed);
    boost::random::uniform_real_distribution<double> ph(0, kTwoPi), amp(0.01, 0.2);
    ChannelState s;
    s.direct_quantum = {1.0, ph(rng)};
    s.direct_classical = {0.7, ph(rng)};
    for (std::size_t k = 0; k < n; ++k) {
        s.cascade_quantum.push_back({amp(rng), ph(rng)});
        s.cascade_classical.push_back({amp(rng), ph(rng)});
    }
    s.bits_quantum = bq;
    s.bits_classical = bc;
    return s;
}

}  // namespace

TEST_SUITE("ris") {

TEST_CASE("bit layout indices") {
    BitLayout l(100, 2, 2);
    CHECK(l.index_of(0, Band::quantum, 0) == 0);
    CHECK(l.index_of(0, Band::classical, 0) == 200);
    CHECK(l.index_of(99, Band::classical, 1) == 399);
    CHECK(l.dim() == 400);
    CHECK_THROWS_AS(l.index_of(100, Band::quantum, 0), std::out_of_range);
    CHECK_THROWS_AS(l.index_of(0, Band::quantum, 2), std::out_of_range);
    CHECK_THROWS_AS(l.index_of(0, Band::classical, -1), std::out_of_range);
}

TEST_CASE("bit layout is a bijection") {
    BitLayout l(7, 3, 2);
    std::set<std::size_t> seen;
    for (std::size_t e = 0; e < 7; ++e)
        for (Band b : {Band::quantum, Band::classical})
            for (int k = 0; k < l.bits(b); ++k) {
                const std::size_t i = l.index_of(e, b, k);
                CHECK(seen.insert(i).second);
                const auto s = l.slot_of(i);
                CHECK(s.element == e);
                CHECK(s.band == b);
                CHECK(s.bit == k);
            }
    CHECK(seen.size() == l.dim());
    CHECK(*seen.rbegin() == l.dim() - 1);
}

TEST_CASE("decode phases") {
    RisConfig cfg;
    cfg.n_elements = 1;
    auto phase_q = [&](std::vector<std::uint8_t> bits) { return decode_phases(bits, cfg).phases_quantum[0]; };
    CHECK(phase_q({0, 0, 0, 0}) == 0.0);
    CHECK(phase_q({1, 0, 0, 0}) == doctest::Approx(kPi / 2));
    CHECK(phase_q({1, 1, 0, 0}) == doctest::Approx(1.5 * kPi));
    CHECK(decode_phases(std::vector<std::uint8_t>{0, 0, 0, 1}, cfg).phases_classical[0] == doctest::Approx(kPi));
    CHECK_THROWS_AS(decode_phases(std::vector<std::uint8_t>{0, 0, 0}, cfg), std::invalid_argument);
}

TEST_CASE("decoded phases lie on the quantized grid and round-trip") {
    BitLayout l(16, 3, 2);
    Rng rng(5);
    boost::random::uniform_int_distribution<int> coin(0, 1);
    std::vector<std::uint8_t> x(l.dim());
    for (auto& b : x) b = static_cast<std::uint8_t>(coin(rng));
    const PhaseConfig p = decode_phases(x, l);
    for (std::size_t e = 0; e < 16; ++e) {
        const double steps_q = p.phases_quantum[e] / (kTwoPi / 8);
        const double steps_c = p.phases_classical[e] / (kTwoPi / 4);
        CHECK(steps_q == doctest::Approx(std::round(steps_q)));
        CHECK(steps_c == doctest::Approx(std::round(steps_c)));
        CHECK(quantized_phase(l.level(x, e, Band::quantum), 3) == p.phases_quantum[e]);
    }
    std::vector<std::uint8_t> y(l.dim(), 0);
    for (std::size_t e = 0; e < 16; ++e) {
        l.set_level(y, e, Band::quantum, l.level(x, e, Band::quantum));
        l.set_level(y, e, Band::classical, l.level(x, e, Band::classical));
    }
    CHECK(x == y);
}

TEST_CASE("cascade gains") {
    RisConfig cfg;
    OpticalParams o;
    RfParams r;
    const auto g = make_link_geometry(deg_to_rad(45), GeometryParams{});
    cfg.n_elements = 0;
    CHECK(cascade_gains(cfg, g, o).empty());
    cfg.n_elements = 32;
    cfg.ris_offset_phase_seed = 99;
    const auto a = cascade_gains(cfg, g, o);
    const auto b = cascade_gains(cfg, g, o);
    REQUIRE(a.size() == 32);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].phase_rad == b[k].phase_rad);
        CHECK(a[k].amplitude == a[0].amplitude);
        CHECK(a[k].phase_rad >= 0.0);
        CHECK(a[k].phase_rad < kTwoPi);
    }
    const auto c = cascade_gains(cfg, g, r);
    CHECK(c[0].phase_rad != a[0].phase_rad);
    CHECK(cascade_gains(cfg, g, o, 2.0)[3].amplitude == doctest::Approx(2 * a[3].amplitude));
    cfg.element_gain = 0.0;
    for (const auto& x : cascade_gains(cfg, g, r)) CHECK(x.amplitude == 0.0);
}

TEST_CASE("composite gain") {
    const ComplexGain d{1.0, 0.0};
    CHECK(composite_gain(d, {}, {}).amplitude == 1.0);
    const std::vector<ComplexGain> two{{0.1, 0.0}, {0.1, 0.0}};
    const std::vector<double> zero{0.0, 0.0};
    const auto h = composite_gain(d, two, zero);
    CHECK(h.amplitude == doctest::Approx(1.2));
    CHECK(std::min(h.phase_rad, kTwoPi - h.phase_rad) == doctest::Approx(0.0).epsilon(1e-12));
    const std::vector<ComplexGain> one{{0.1, kPi}};
    const std::vector<double> pi{kPi};
    const auto h2 = composite_gain(d, one, pi);
    CHECK(h2.amplitude == doctest::Approx(1.1));
    CHECK(std::min(h2.phase_rad, kTwoPi - h2.phase_rad) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(composite_gain(d, one, zero), std::invalid_argument);
    const std::vector<ComplexGain> zeros(3, ComplexGain{0.0, 1.0});
    const std::vector<double> ph{0.3, 1.0, 2.0};
    CHECK(composite_gain({0.5, 0.25}, zeros, ph).amplitude == 0.5);
    CHECK(composite_gain({0.5, 0.25}, zeros, ph).phase_rad == 0.25);
}

TEST_CASE("greedy quantized alignment") {
    const ComplexGain d{1.0, 0.4};
    const std::vector<ComplexGain> aligned{{0.1, 0.4}};
    CHECK(best_quantized_alignment(d, aligned, 2)[0] == 0);
    const std::vector<ComplexGain> off{{0.1, 0.4 + deg_to_rad(100)}};
    CHECK(best_quantized_alignment(d, off, 2)[0] == 3);
    const std::vector<ComplexGain> ortho{{0.1, 0.4 + kPi / 2}};
    CHECK(best_quantized_alignment(d, ortho, 1)[0] == 0);
}

TEST_CASE("composite bounds and band independence") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const ChannelState s = random_state(seed, 12);
        const BitLayout l = s.layout();
        Rng rng(seed * 31);
        boost::random::uniform_int_distribution<int> coin(0, 1);
        std::vector<std::uint8_t> x(l.dim());
        for (auto& b : x) b = static_cast<std::uint8_t>(coin(rng));
        const PhaseConfig p = decode_phases(x, l);
        double sum_q = s.direct_quantum.amplitude;
        for (const auto& g : s.cascade_quantum) sum_q += g.amplitude;
        CHECK(composite_gain(s.direct_quantum, s.cascade_quantum, p.phases_quantum).amplitude <= sum_q + 1e-12);

        // Flipping every classical bit leaves the quantum composite bitwise unchanged.
        std::vector<std::uint8_t> y = x;
        for (std::size_t e = 0; e < l.n_elements(); ++e)
            for (int k = 0; k < l.bits(Band::classical); ++k) y[l.index_of(e, Band::classical, k)] ^= 1u;
        const PhaseConfig p2 = decode_phases(y, l);
        CHECK(composite_value(s.direct_quantum, s.cascade_quantum, p.phases_quantum) ==
              composite_value(s.direct_quantum, s.cascade_quantum, p2.phases_quantum));

        const PhaseConfig a = aligned_configuration(s);
        CHECK(composite_gain(s.direct_quantum, s.cascade_quantum, a.phases_quantum).amplitude >=
              s.direct_quantum.amplitude);
        CHECK(composite_gain(s.direct_classical, s.cascade_classical, a.phases_classical).amplitude >=
              s.direct_classical.amplitude);
        const auto lv = best_quantized_alignment(s.direct_quantum, s.cascade_quantum, 2);
        for (std::size_t e = 0; e < lv.size(); ++e) {
            const auto& g = s.cascade_quantum[e];
            const double proj = g.amplitude * std::cos(g.phase_rad + quantized_phase(lv[e], 2) - s.direct_quantum.phase_rad);
            CHECK(proj >= g.amplitude * std::cos(kPi / 4) - 1e-12);
        }
    }
}

TEST_CASE("channel state validation") {
    ChannelState s = random_state(3, 4);
    s.cascade_classical.pop_back();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

}
