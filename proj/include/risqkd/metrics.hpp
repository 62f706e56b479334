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

#include "risqkd/channels.hpp"

namespace risqkd {

/// BB84 security threshold on the QBER.
inline constexpr double kQberSecurityLimit = 0.11;

struct Metrics {
    double snr_linear = 0.0;
    double ber = 0.5;
    double qber = 0.5;
    double skr_bits_s = 0.0;
    double skr_raw_bits_s = 0.0;  // before clamping at zero
    double cost = 0.0;
};

enum class WeightMode { static_range, swing };

/// Cost-normalization settings: ε★, Γ★ and β₀.
struct CostWeights {
    double qber_threshold = 0.011;
    double snr_target = 100.0;
    double beta_o = 0.01;
    WeightMode mode = WeightMode::static_range;

    void validate() const;
};

/// Resolved (α, β) pair for F = α·ε − β·log2(1 + Γ).
struct Weights {
    double alpha = 1.0;
    double beta = 0.0;
};

/// Constants that pin the model to the measured anchors.
struct Calibration {
    double raw_rate_scale = 1.0;         // bits/s per unit normalized transmittance
    double effective_visibility = 1.0;   // V_eff
    double rf_gain_offset_db = 0.0;
    double element_amp_scale = 1.0;      // quantum cascade amplitude scale
    double element_amp_scale_classical = 1.0;
    double reference_power = 1.0;        // |H_ref|², background-equivalent optical power
};

double q_function(double x);
double noise_power(const RfParams& rf);

/// Γ = P_t·|H|²·10^{offset/10} / (k_B T B). Antenna gains already live in H.
double snr(const RfParams& rf, const ComplexGain& h_tot, double gain_offset_db = 0.0);

double ber_qpsk(double snr_linear);
double visibility(double v0, double phase_variance);

/// ε = ½(1 − V·h) + p_dark, clamped to [0, 0.5 + p_dark].
double qber(double visibility, double h_norm_sq, double p_dark);

/// t/(t + 1) with t = power / reference_power: the share of detection events
/// caused by signal rather than by background of equivalent power |H_ref|².
double signal_fraction(double power, double reference_power);

double binary_entropy(double p);

/// R_raw·[1 − 2h₂(ε)] − f_EC·R_raw·h₂(ε), without clamping.
double skr_unclamped(double raw_rate, double qber, double f_ec);
/// Same, clamped at zero.
double skr(double raw_rate, double qber, double f_ec);

Weights static_weights(const CostWeights& cw);
/// Throws std::domain_error when current_snr <= 0.
Weights swing_weights(const CostWeights& cw, double current_snr);
/// Static or swing depending on cw.mode; `baseline_snr` feeds the swing form.
Weights resolve_weights(const CostWeights& cw, double baseline_snr);

double cost(double qber, double snr_linear, const Weights& weights);

/// Receiver-side evaluation of both links from composite channel powers
/// |H_Q^tot|² and |H_C^tot|².
class ReceiverModel {
public:
    /// Visibility V_eff and the signal-fraction normalization against |H_ref|².
    static ReceiverModel calibrated(const OpticalParams& optical, const RfParams& rf,
                                    const Calibration& cal);
    /// V = V0·exp(−σ_φ²/2) and h_norm_sq = min(|H|², 1); R_raw = |H|² bits/s.
    static ReceiverModel uncalibrated(const OpticalParams& optical, const RfParams& rf);

    double snr(double power_classical) const;
    double normalized_transmittance(double power_quantum) const;
    double qber(double power_quantum) const;
    double raw_rate(double power_quantum) const;

    /// dε/dP_Q and d log2(1 + Γ)/dP_C at the given powers.
    double qber_slope(double power_quantum) const;
    double spectral_efficiency_slope(double power_classical) const;

    Metrics evaluate(double power_quantum, double power_classical, const Weights& w) const;
    double cost(double power_quantum, double power_classical, const Weights& w) const;

    bool is_calibrated() const { return calibrated_; }
    double visibility() const { return visibility_; }
    double dark_count_prob() const { return p_dark_; }

private:
    bool calibrated_ = true;
    double visibility_ = 1.0;
    double p_dark_ = 0.0;
    double f_ec_ = 1.1;
    double reference_power_ = 1.0;
    double raw_rate_scale_ = 1.0;
    double snr_per_power_ = 1.0;
};

}  // namespace risqkd
