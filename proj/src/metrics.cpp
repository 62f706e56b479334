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

#include "risqkd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risqkd {

void CostWeights::validate() const {
    if (!(qber_threshold > 0 && qber_threshold <= kQberSecurityLimit))
        throw std::invalid_argument("weights: qber_threshold must be in (0, 0.11]");
    if (!(snr_target > 0)) throw std::invalid_argument("weights: snr_target must be > 0");
    if (!(beta_o >= 0)) throw std::invalid_argument("weights: beta_o must be >= 0");
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double noise_power(const RfParams& rf) { return kBoltzmann * rf.sys_temp_k * rf.bandwidth_hz; }

double snr(const RfParams& rf, const ComplexGain& h_tot, double gain_offset_db) {
    return rf.tx_power_w * std::pow(10.0, gain_offset_db / 10.0) * h_tot.power() /
           noise_power(rf);
}

double ber_qpsk(double snr_linear) { return q_function(std::sqrt(2.0 * std::max(snr_linear, 0.0))); }

double visibility(double v0, double phase_variance) { return v0 * std::exp(-phase_variance / 2.0); }

double qber(double visibility, double h_norm_sq, double p_dark) {
    const double e = 0.5 * (1.0 - visibility * h_norm_sq) + p_dark;
    return std::clamp(e, 0.0, 0.5 + p_dark);
}

double signal_fraction(double power, double reference_power) {
    const double t = power / reference_power;
    return t / (t + 1.0);
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double skr_unclamped(double raw_rate, double qber, double f_ec) {
    const double h = binary_entropy(qber);
    return raw_rate * (1.0 - 2.0 * h) - f_ec * raw_rate * h;
}

double skr(double raw_rate, double qber, double f_ec) {
    return std::max(0.0, skr_unclamped(raw_rate, qber, f_ec));
}

Weights static_weights(const CostWeights& cw) {
    if (!(cw.snr_target > 0)) throw std::domain_error("static_weights: snr_target must be > 0");
    return {1.0, cw.qber_threshold / std::log2(1.0 + cw.snr_target)};
}

Weights swing_weights(const CostWeights& cw, double current_snr) {
    if (!(current_snr > 0)) throw std::domain_error("swing_weights: current SNR must be > 0");
    if (!(cw.qber_threshold > 0)) throw std::domain_error("swing_weights: qber_threshold must be > 0");
    return {1.0 / cw.qber_threshold,
            cw.beta_o * std::log2(1.0 + cw.snr_target) / std::log2(1.0 + current_snr)};
}

Weights resolve_weights(const CostWeights& cw, double baseline_snr) {
    return cw.mode == WeightMode::swing ? swing_weights(cw, baseline_snr) : static_weights(cw);
}

double cost(double qber, double snr_linear, const Weights& weights) {
    return weights.alpha * qber - weights.beta * std::log2(1.0 + std::max(snr_linear, 0.0));
}

ReceiverModel ReceiverModel::calibrated(const OpticalParams& optical, const RfParams& rf,
                                        const Calibration& cal) {
    ReceiverModel m;
    m.calibrated_ = true;
    m.visibility_ = cal.effective_visibility;
    m.p_dark_ = optical.dark_count_prob;
    m.f_ec_ = optical.ec_inefficiency;
    m.reference_power_ = cal.reference_power;
    m.raw_rate_scale_ = cal.raw_rate_scale;
    m.snr_per_power_ =
        rf.tx_power_w * std::pow(10.0, cal.rf_gain_offset_db / 10.0) / noise_power(rf);
    return m;
}

ReceiverModel ReceiverModel::uncalibrated(const OpticalParams& optical, const RfParams& rf) {
    ReceiverModel m;
    m.calibrated_ = false;
    m.visibility_ = risqkd::visibility(optical.baseline_visibility, optical.phase_variance);
    m.p_dark_ = optical.dark_count_prob;
    m.f_ec_ = optical.ec_inefficiency;
    m.reference_power_ = 1.0;
    m.raw_rate_scale_ = 1.0;
    m.snr_per_power_ = rf.tx_power_w / noise_power(rf);
    return m;
}

double ReceiverModel::snr(double power_classical) const { return snr_per_power_ * power_classical; }

double ReceiverModel::normalized_transmittance(double power_quantum) const {
    if (calibrated_) return signal_fraction(power_quantum, reference_power_);
    return std::clamp(power_quantum, 0.0, 1.0);
}

double ReceiverModel::qber(double power_quantum) const {
    return risqkd::qber(visibility_, normalized_transmittance(power_quantum), p_dark_);
}

double ReceiverModel::raw_rate(double power_quantum) const {
    return raw_rate_scale_ * power_quantum / reference_power_;
}

double ReceiverModel::qber_slope(double power_quantum) const {
    const double e = 0.5 * (1.0 - visibility_ * normalized_transmittance(power_quantum)) + p_dark_;
    if (e <= 0.0 || e >= 0.5 + p_dark_) return 0.0;
    if (calibrated_) {
        const double t1 = power_quantum / reference_power_ + 1.0;
        return -0.5 * visibility_ / (reference_power_ * t1 * t1);
    }
    return power_quantum < 1.0 ? -0.5 * visibility_ : 0.0;
}

double ReceiverModel::spectral_efficiency_slope(double power_classical) const {
    return snr_per_power_ / ((1.0 + snr_per_power_ * power_classical) * std::numbers::ln2);
}

Metrics ReceiverModel::evaluate(double power_quantum, double power_classical,
                                const Weights& w) const {
    Metrics m;
    m.snr_linear = snr(power_classical);
    m.ber = ber_qpsk(m.snr_linear);
    m.qber = qber(power_quantum);
    const double raw = raw_rate(power_quantum);
    m.skr_raw_bits_s = skr_unclamped(raw, m.qber, f_ec_);
    m.skr_bits_s = std::max(0.0, m.skr_raw_bits_s);
    m.cost = risqkd::cost(m.qber, m.snr_linear, w);
    return m;
}

double ReceiverModel::cost(double power_quantum, double power_classical, const Weights& w) const {
    return risqkd::cost(qber(power_quantum), snr(power_classical), w);
}

}  // namespace risqkd
