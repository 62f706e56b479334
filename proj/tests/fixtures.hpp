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

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "risqkd/metrics.hpp"
#include "risqkd/ris.hpp"
#include "risqkd/rng.hpp"

namespace testing {

using namespace risqkd;

/// Unit direct gains, cascade amplitudes drawn in [lo, hi] relative to them.
inline ChannelState random_state(std::uint64_t seed, std::size_t n, int bits = 2, double lo = 0.02,
                                 double hi = 0.3) {
    Rng rng(seed);
    boost::random::uniform_real_distribution<double> ph(0, kTwoPi), amp(lo, hi);
    ChannelState s;
    s.direct_quantum = {1.0, ph(rng)};
    s.direct_classical = {1.0, ph(rng)};
    for (std::size_t k = 0; k < n; ++k) {
        s.cascade_quantum.push_back({amp(rng), ph(rng)});
        s.cascade_classical.push_back({amp(rng), ph(rng)});
    }
    s.bits_quantum = bits;
    s.bits_classical = bits;
    return s;
}

/// Receiver with |H_ref|² = 1 and SNR 100 at unit classical power.
inline ReceiverModel unit_receiver(double visibility = 0.98) {
    OpticalParams o;
    RfParams rf;
    Calibration cal;
    cal.reference_power = 1.0;
    cal.effective_visibility = visibility;
    cal.raw_rate_scale = 1000.0;
    cal.rf_gain_offset_db = 20.0 - 10.0 * std::log10(rf.tx_power_w / noise_power(rf));
    return ReceiverModel::calibrated(o, rf, cal);
}

inline std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t n) {
    boost::random::uniform_int_distribution<int> coin(0, 1);
    std::vector<std::uint8_t> x(n);
    for (auto& b : x) b = static_cast<std::uint8_t>(coin(rng));
    return x;
}

inline std::vector<std::uint8_t> bits_of(std::uint64_t v, std::size_t n) {
    std::vector<std::uint8_t> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (v >> i) & 1u;
    return x;
}

}  // namespace testing
