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
#include <span>
#include <vector>

#include "risqkd/channels.hpp"

namespace risqkd {

enum class Band : std::uint8_t { quantum = 0, classical = 1 };

const char* band_name(Band band);

struct RisConfig {
    std::size_t n_elements = 512;
    int bits_quantum = 2;
    int bits_classical = 2;
    double element_gain = 1.0;
    double ris_to_ground_km = 0.5;
    std::uint64_t ris_offset_phase_seed = 0;

    void validate() const;
    int bits(Band band) const { return band == Band::quantum ? bits_quantum : bits_classical; }
    std::size_t num_variables() const {
        return n_elements * static_cast<std::size_t>(bits_quantum + bits_classical);
    }
};

/// Position of each phase bit in the decision vector: the whole quantum
/// block (element-major, then bit) followed by the classical block.
/// Element indices are zero-based.
class BitLayout {
public:
    BitLayout() = default;
    BitLayout(std::size_t n_elements, int bits_quantum, int bits_classical);
    explicit BitLayout(const RisConfig& cfg)
        : BitLayout(cfg.n_elements, cfg.bits_quantum, cfg.bits_classical) {}

    std::size_t n_elements() const { return n_; }
    int bits(Band band) const { return band == Band::quantum ? bq_ : bc_; }
    std::size_t dim() const { return n_ * static_cast<std::size_t>(bq_ + bc_); }

    /// Throws std::out_of_range on an invalid (element, band, bit).
    std::size_t index_of(std::size_t element, Band band, int bit) const;

    struct Slot {
        std::size_t element;
        Band band;
        int bit;
    };
    Slot slot_of(std::size_t index) const;

    /// Quantization level Σ_k 2^k x_{n,k} of one element in one band.
    std::uint32_t level(std::span<const std::uint8_t> bits, std::size_t element, Band band) const;
    void set_level(std::span<std::uint8_t> bits, std::size_t element, Band band,
                   std::uint32_t level) const;

private:
    std::size_t n_ = 0;
    int bq_ = 1;
    int bc_ = 1;
};

/// Phase 2π·level / 2^bits.
double quantized_phase(std::uint32_t level, int bits);

struct PhaseConfig {
    std::vector<std::uint8_t> bits;
    std::vector<double> phases_quantum;
    std::vector<double> phases_classical;
};

/// Direct gains plus per-element cascade gains g_n (satellite→RIS→ground
/// products) for both bands.
struct ChannelState {
    ComplexGain direct_quantum;
    ComplexGain direct_classical;
    std::vector<ComplexGain> cascade_quantum;
    std::vector<ComplexGain> cascade_classical;
    int bits_quantum = 2;
    int bits_classical = 2;

    std::size_t n_elements() const { return cascade_quantum.size(); }
    BitLayout layout() const { return {n_elements(), bits_quantum, bits_classical}; }
    const ComplexGain& direct(Band band) const {
        return band == Band::quantum ? direct_quantum : direct_classical;
    }
    const std::vector<ComplexGain>& cascades(Band band) const {
        return band == Band::quantum ? cascade_quantum : cascade_classical;
    }
    /// Throws std::invalid_argument when the cascade arrays differ in length.
    void validate() const;
};

/// Decodes the binary decision vector into per-band quantized phases.
/// Throws std::invalid_argument on a length mismatch.
PhaseConfig decode_phases(std::span<const std::uint8_t> bits, const RisConfig& cfg);
PhaseConfig decode_phases(std::span<const std::uint8_t> bits, const BitLayout& layout);

/// Per-element cascade gains. Each element's amplitude is
///   scale · element_gain · friis(d1) · friis(d2) · sqrt(G_t G_r) · atm(d1)
/// with d1 the slant range (satellite far field) and d2 the RIS-to-ground
/// distance; the short RIS→ground leg is lossless. Incident phase offsets are
/// uniform on [0, 2π) from cfg.ris_offset_phase_seed, independently per band.
std::vector<ComplexGain> cascade_gains(const RisConfig& cfg, const LinkGeometry& geom,
                                       const OpticalParams& optical, double amplitude_scale = 1.0);
std::vector<ComplexGain> cascade_gains(const RisConfig& cfg, const LinkGeometry& geom,
                                       const RfParams& rf, double amplitude_scale = 1.0);

/// H_direct + Σ g_n e^{jθ_n}. Throws std::invalid_argument on length mismatch.
ComplexGain composite_gain(const ComplexGain& direct, std::span<const ComplexGain> cascades,
                           std::span<const double> phases);
std::complex<double> composite_value(const ComplexGain& direct,
                                     std::span<const ComplexGain> cascades,
                                     std::span<const double> phases);

/// Greedy per-element alignment: for each element picks the quantized level
/// maximizing Re(g_n e^{jθ} e^{-j∠H_direct}); near-ties go to the lower level.
std::vector<std::uint32_t> best_quantized_alignment(const ComplexGain& direct,
                                                    std::span<const ComplexGain> cascades,
                                                    int bits_per_element);

/// Both bands aligned greedily and packed into a PhaseConfig.
PhaseConfig aligned_configuration(const ChannelState& state);

}  // namespace risqkd
