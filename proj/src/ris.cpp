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

#include "risqkd/ris.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/random/uniform_real_distribution.hpp>

#include "risqkd/rng.hpp"

namespace risqkd {

const char* band_name(Band band) { return band == Band::quantum ? "quantum" : "classical"; }

void RisConfig::validate() const {
    if (bits_quantum < 1 || bits_classical < 1 || bits_quantum > 16 || bits_classical > 16)
        throw std::invalid_argument("ris: bits per band must be in [1, 16]");
    if (!(element_gain >= 0)) throw std::invalid_argument("ris: element_gain must be >= 0");
    if (!(ris_to_ground_km > 0)) throw std::invalid_argument("ris: ris_to_ground_km must be > 0");
}

BitLayout::BitLayout(std::size_t n_elements, int bits_quantum, int bits_classical)
    : n_(n_elements), bq_(bits_quantum), bc_(bits_classical) {
    if (bq_ < 1 || bc_ < 1) throw std::invalid_argument("BitLayout: bits per band must be >= 1");
}

std::size_t BitLayout::index_of(std::size_t element, Band band, int bit) const {
    const int b = bits(band);
    if (element >= n_ || bit < 0 || bit >= b) {
        throw std::out_of_range("index_of: (element " + std::to_string(element) + ", " +
                                band_name(band) + ", bit " + std::to_string(bit) +
                                ") outside layout");
    }
    const std::size_t block = band == Band::quantum ? 0 : n_ * static_cast<std::size_t>(bq_);
    return block + element * static_cast<std::size_t>(b) + static_cast<std::size_t>(bit);
}

BitLayout::Slot BitLayout::slot_of(std::size_t index) const {
    if (index >= dim()) throw std::out_of_range("slot_of: index outside layout");
    const std::size_t quantum_block = n_ * static_cast<std::size_t>(bq_);
    if (index < quantum_block) {
        return {index / static_cast<std::size_t>(bq_), Band::quantum,
                static_cast<int>(index % static_cast<std::size_t>(bq_))};
    }
    const std::size_t r = index - quantum_block;
    return {r / static_cast<std::size_t>(bc_), Band::classical,
            static_cast<int>(r % static_cast<std::size_t>(bc_))};
}

std::uint32_t BitLayout::level(std::span<const std::uint8_t> bits, std::size_t element,
                               Band band) const {
    std::uint32_t level = 0;
    const int b = this->bits(band);
    const std::size_t base = index_of(element, band, 0);
    for (int k = 0; k < b; ++k) {
        if (bits[base + static_cast<std::size_t>(k)]) level |= (1u << k);
    }
    return level;
}

void BitLayout::set_level(std::span<std::uint8_t> bits, std::size_t element, Band band,
                          std::uint32_t level) const {
    const int b = this->bits(band);
    const std::size_t base = index_of(element, band, 0);
    for (int k = 0; k < b; ++k) bits[base + static_cast<std::size_t>(k)] = (level >> k) & 1u;
}

double quantized_phase(std::uint32_t level, int bits) {
    return kTwoPi * static_cast<double>(level) / static_cast<double>(1u << bits);
}

void ChannelState::validate() const {
    if (cascade_quantum.size() != cascade_classical.size())
        throw std::invalid_argument("ChannelState: cascade arrays must have equal length");
    if (bits_quantum < 1 || bits_classical < 1)
        throw std::invalid_argument("ChannelState: bits per band must be >= 1");
}

PhaseConfig decode_phases(std::span<const std::uint8_t> bits, const BitLayout& layout) {
    if (bits.size() != layout.dim()) {
        throw std::invalid_argument("decode_phases: expected " + std::to_string(layout.dim()) +
                                    " bits, got " + std::to_string(bits.size()));
    }
    PhaseConfig out;
    out.bits.assign(bits.begin(), bits.end());
    const std::size_t n = layout.n_elements();
    out.phases_quantum.resize(n);
    out.phases_classical.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        out.phases_quantum[e] =
            quantized_phase(layout.level(bits, e, Band::quantum), layout.bits(Band::quantum));
        out.phases_classical[e] =
            quantized_phase(layout.level(bits, e, Band::classical), layout.bits(Band::classical));
    }
    return out;
}

PhaseConfig decode_phases(std::span<const std::uint8_t> bits, const RisConfig& cfg) {
    return decode_phases(bits, BitLayout(cfg));
}

namespace {

std::vector<ComplexGain> make_cascades(const RisConfig& cfg, Band band, double amplitude) {
    std::vector<ComplexGain> out(cfg.n_elements);
    Rng rng(mix64(cfg.ris_offset_phase_seed ^ (static_cast<std::uint64_t>(band) + 1)));
    boost::random::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (auto& g : out) g = {amplitude, wrap_phase(phase(rng))};
    return out;
}

}  // namespace

std::vector<ComplexGain> cascade_gains(const RisConfig& cfg, const LinkGeometry& geom,
                                       const OpticalParams& optical, double amplitude_scale) {
    const double lambda = optical.wavelength_m;
    const double amp = amplitude_scale * cfg.element_gain *
                       friis_amplitude(geom.slant_range_km * 1e3, lambda) *
                       friis_amplitude(cfg.ris_to_ground_km * 1e3, lambda) *
                       std::sqrt(optical_tx_gain(optical) * optical_rx_gain(optical)) *
                       optical_atmospheric_amplitude(optical, geom);
    return make_cascades(cfg, Band::quantum, amp);
}

std::vector<ComplexGain> cascade_gains(const RisConfig& cfg, const LinkGeometry& geom,
                                       const RfParams& rf, double amplitude_scale) {
    const double lambda = rf.wavelength_m;
    const double amp = amplitude_scale * cfg.element_gain *
                       friis_amplitude(geom.slant_range_km * 1e3, lambda) *
                       friis_amplitude(cfg.ris_to_ground_km * 1e3, lambda) *
                       std::sqrt(rf.tx_gain * rf.rx_gain) * rf_impairment_amplitude(rf, geom);
    return make_cascades(cfg, Band::classical, amp);
}

std::complex<double> composite_value(const ComplexGain& direct,
                                     std::span<const ComplexGain> cascades,
                                     std::span<const double> phases) {
    if (cascades.size() != phases.size())
        throw std::invalid_argument("composite_gain: cascades and phases differ in length");
    std::complex<double> total = direct.value();
    for (std::size_t n = 0; n < cascades.size(); ++n) {
        total += std::polar(cascades[n].amplitude, cascades[n].phase_rad + phases[n]);
    }
    return total;
}

ComplexGain composite_gain(const ComplexGain& direct, std::span<const ComplexGain> cascades,
                           std::span<const double> phases) {
    if (cascades.empty()) return direct;
    return ComplexGain::from_complex(composite_value(direct, cascades, phases));
}

std::vector<std::uint32_t> best_quantized_alignment(const ComplexGain& direct,
                                                    std::span<const ComplexGain> cascades,
                                                    int bits_per_element) {
    if (bits_per_element < 1)
        throw std::invalid_argument("best_quantized_alignment: bits must be >= 1");
    const std::uint32_t levels = 1u << bits_per_element;
    std::vector<std::uint32_t> out(cascades.size(), 0);
    for (std::size_t n = 0; n < cascades.size(); ++n) {
        const double a = cascades[n].amplitude;
        const double tie = 1e-12 * a;
        double best = -std::numeric_limits<double>::infinity();
        for (std::uint32_t m = 0; m < levels; ++m) {
            const double proj =
                a * std::cos(cascades[n].phase_rad + quantized_phase(m, bits_per_element) -
                             direct.phase_rad);
            if (proj > best + tie) {
                best = proj;
                out[n] = m;
            }
        }
    }
    return out;
}

PhaseConfig aligned_configuration(const ChannelState& state) {
    const BitLayout layout = state.layout();
    std::vector<std::uint8_t> bits(layout.dim(), 0);
    const auto q = best_quantized_alignment(state.direct_quantum, state.cascade_quantum,
                                            state.bits_quantum);
    const auto c = best_quantized_alignment(state.direct_classical, state.cascade_classical,
                                            state.bits_classical);
    for (std::size_t e = 0; e < layout.n_elements(); ++e) {
        layout.set_level(bits, e, Band::quantum, q[e]);
        layout.set_level(bits, e, Band::classical, c[e]);
    }
    return decode_phases(bits, layout);
}

}  // namespace risqkd
