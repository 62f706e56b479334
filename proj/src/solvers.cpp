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

#include "risqkd/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "risqkd/rng.hpp"

namespace risqkd {

namespace {

constexpr double kTieRel = 1e-12;

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= kTieRel * std::max(std::abs(a), std::abs(b));
}

bool lex_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// True when (v, x) should replace (best, best_x).
bool improves(double v, std::span<const std::uint8_t> x, double best, std::span<const std::uint8_t> best_x) {
    if (nearly_equal(v, best)) return lex_less(x, best_x);
    return v < best;
}

void check_length(std::size_t got, std::size_t dim, const char* who) {
    if (got != dim)
        throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(dim) +
                                    " bits, got " + std::to_string(got));
}

class QuadraticWalker final : public Walker {
public:
    QuadraticWalker(const QuadraticObjective& obj, std::span<const std::uint8_t> x) : obj_(obj) {
        const QuboModel& m = obj.model();
        x_.assign(x.begin(), x.end());
        field_.assign(m.linear().begin(), m.linear().end());
        for (const auto& t : m.interactions()) {
            if (x_[t.j]) field_[t.i] += t.value;
            if (x_[t.i]) field_[t.j] += t.value;
        }
        value_ = eval_quadratic(m, x_);
    }
    double value() const override { return value_; }
    double delta(std::size_t i) const override { return x_[i] ? -field_[i] : field_[i]; }
    void flip(std::size_t i) override {
        value_ += delta(i);
        x_[i] ^= 1u;
        const double sign = x_[i] ? 1.0 : -1.0;
        for (const auto& nb : obj_.model().neighbors(i)) field_[nb.index] += sign * nb.value;
    }
    bool feasible() const override { return obj_.feasible(x_); }

private:
    const QuadraticObjective& obj_;
    std::vector<double> field_;
    double value_ = 0.0;
};

class ExactWalker final : public Walker {
public:
    ExactWalker(const ExactObjective& obj, std::span<const std::uint8_t> x) : obj_(obj) {
        x_.assign(x.begin(), x.end());
        resync();
    }
    double value() const override { return value_; }
    double delta(std::size_t i) const override {
        std::complex<double> hq = hq_, hc = hc_;
        shifted(i, hq, hc);
        return obj_.cost_from_sums(hq, hc) - value_;
    }
    void flip(std::size_t i) override {
        shifted(i, hq_, hc_);
        x_[i] ^= 1u;
        if (++flips_ % 1024 == 0) {
            resync();
        } else {
            value_ = obj_.cost_from_sums(hq_, hc_);
        }
    }
    bool feasible() const override { return obj_.feasible_from_sum(hq_); }

private:
    void resync() {
        hq_ = obj_.band_sum(Band::quantum, x_);
        hc_ = obj_.band_sum(Band::classical, x_);
        value_ = obj_.cost_from_sums(hq_, hc_);
    }
    // Applies the effect of flipping bit i to the band sums.
    void shifted(std::size_t i, std::complex<double>& hq, std::complex<double>& hc) const {
        const BitLayout& l = obj_.layout();
        const auto s = l.slot_of(i);
        const std::uint32_t old_level = l.level(x_, s.element, s.band);
        const std::uint32_t new_level = old_level ^ (1u << s.bit);
        auto& h = s.band == Band::quantum ? hq : hc;
        h += obj_.contribution(s.band, s.element, new_level) - obj_.contribution(s.band, s.element, old_level);
    }

    const ExactObjective& obj_;
    std::complex<double> hq_, hc_;
    double value_ = 0.0;
    std::size_t flips_ = 0;
};

// Best and best-feasible bookkeeping shared by all solvers.
class Tracker {
public:
    explicit Tracker(const Objective& obj) : obj_(obj) {}

    template <class FeasibleFn>
    void consider(std::span<const std::uint8_t> x, double v, FeasibleFn&& is_feasible) {
        if (!have_ || improves(v, x, r_.best_value, r_.best_bits)) {
            r_.best_bits.assign(x.begin(), x.end());
            r_.best_value = v;
            have_ = true;
        }
        if (!r_.has_feasible || improves(v, x, r_.best_feasible_value, r_.best_feasible_bits)) {
            if (is_feasible()) {
                r_.best_feasible_bits.assign(x.begin(), x.end());
                r_.best_feasible_value = v;
                r_.has_feasible = true;
            }
        }
    }
    void consider(const Walker& w) {
        consider(w.bits(), w.value(), [&] { return w.feasible(); });
    }
    void mark(std::size_t iteration) { r_.trace.push_back({iteration, r_.best_value}); }
    double best() const { return r_.best_value; }
    SolverResult& result() { return r_; }

    SolverResult finish() {
        r_.best_value = obj_.evaluate(r_.best_bits);
        r_.feasible = obj_.feasible(r_.best_bits);
        if (r_.has_feasible) r_.best_feasible_value = obj_.evaluate(r_.best_feasible_bits);
        // Keep the trace consistent with the re-scored value.
        for (auto& p : r_.trace) p.best_value = std::max(p.best_value, r_.best_value);
        if (r_.trace.empty() || r_.trace.back().best_value != r_.best_value) {
            const std::size_t it = r_.trace.empty() ? 0 : r_.trace.back().iteration + 1;
            r_.trace.push_back({it, r_.best_value});
        }
        for (std::size_t k = 1; k < r_.trace.size(); ++k)
            r_.trace[k].best_value = std::min(r_.trace[k].best_value, r_.trace[k - 1].best_value);
        return std::move(r_);
    }

private:
    const Objective& obj_;
    SolverResult r_;
    bool have_ = false;
};

std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t dim) {
    boost::random::uniform_int_distribution<int> coin(0, 1);
    std::vector<std::uint8_t> x(dim);
    for (auto& b : x) b = static_cast<std::uint8_t>(coin(rng));
    return x;
}

double auto_temperature(const Objective& obj, Rng& rng, std::size_t& evaluations) {
    constexpr int kSamples = 100;
    double mean = 0.0, m2 = 0.0;
    for (int s = 0; s < kSamples; ++s) {
        const double v = obj.evaluate(random_bits(rng, obj.dim()));
        const double d = v - mean;
        mean += d / (s + 1);
        m2 += d * (v - mean);
    }
    evaluations += kSamples;
    return 10.0 * std::sqrt(m2 / (kSamples - 1));
}

}  // namespace

QuadraticObjective::QuadraticObjective(const QuboModel& model, FeasibilityFn feasible)
    : model_(&model), feasible_(std::move(feasible)) {}

double QuadraticObjective::evaluate(std::span<const std::uint8_t> x) const {
    return eval_quadratic(*model_, x);
}

bool QuadraticObjective::feasible(std::span<const std::uint8_t> x) const {
    return feasible_ ? feasible_(x) : true;
}

std::unique_ptr<Walker> QuadraticObjective::walker(std::span<const std::uint8_t> x) const {
    check_length(x.size(), dim(), "QuadraticObjective::walker");
    return std::make_unique<QuadraticWalker>(*this, x);
}

ExactObjective::ExactObjective(ChannelState state, ReceiverModel receiver, Weights weights,
                               double qber_limit)
    : state_(std::move(state)), receiver_(receiver), weights_(weights), qber_limit_(qber_limit) {
    state_.validate();
    layout_ = state_.layout();
    for (Band band : {Band::quantum, Band::classical}) {
        const int bits = layout_.bits(band);
        const std::uint32_t levels = 1u << bits;
        auto& table = table_[static_cast<int>(band)];
        const auto& g = state_.cascades(band);
        table.resize(g.size() * levels);
        for (std::size_t e = 0; e < g.size(); ++e)
            for (std::uint32_t l = 0; l < levels; ++l)
                table[e * levels + l] = std::polar(g[e].amplitude, g[e].phase_rad + quantized_phase(l, bits));
    }
}

std::complex<double> ExactObjective::contribution(Band band, std::size_t element,
                                                  std::uint32_t level) const {
    const std::uint32_t levels = 1u << layout_.bits(band);
    return table_[static_cast<int>(band)][element * levels + level];
}

std::complex<double> ExactObjective::band_sum(Band band, std::span<const std::uint8_t> x) const {
    check_length(x.size(), dim(), "ExactObjective");
    std::complex<double> h = state_.direct(band).value();
    for (std::size_t e = 0; e < layout_.n_elements(); ++e)
        h += contribution(band, e, layout_.level(x, e, band));
    return h;
}

double ExactObjective::cost_from_sums(std::complex<double> hq, std::complex<double> hc) const {
    return receiver_.cost(std::norm(hq), std::norm(hc), weights_);
}

bool ExactObjective::feasible_from_sum(std::complex<double> hq) const {
    return receiver_.qber(std::norm(hq)) <= qber_limit_;
}

double ExactObjective::evaluate(std::span<const std::uint8_t> x) const {
    return cost_from_sums(band_sum(Band::quantum, x), band_sum(Band::classical, x));
}

bool ExactObjective::feasible(std::span<const std::uint8_t> x) const {
    return feasible_from_sum(band_sum(Band::quantum, x));
}

Metrics ExactObjective::metrics(std::span<const std::uint8_t> x) const {
    return receiver_.evaluate(std::norm(band_sum(Band::quantum, x)),
                              std::norm(band_sum(Band::classical, x)), weights_);
}

std::unique_ptr<Walker> ExactObjective::walker(std::span<const std::uint8_t> x) const {
    check_length(x.size(), dim(), "ExactObjective::walker");
    return std::make_unique<ExactWalker>(*this, x);
}

SolverKind parse_solver_kind(const std::string& s) {
    if (s == "brute") return SolverKind::brute;
    if (s == "anneal") return SolverKind::anneal;
    if (s == "tabu") return SolverKind::tabu;
    if (s == "bcd") return SolverKind::bcd;
    throw std::invalid_argument("unknown solver kind '" + s + "' (brute|anneal|tabu|bcd)");
}

ObjectiveKind parse_objective_kind(const std::string& s) {
    if (s == "quadratic") return ObjectiveKind::quadratic;
    if (s == "exact") return ObjectiveKind::exact;
    throw std::invalid_argument("unknown objective '" + s + "' (quadratic|exact)");
}

const char* solver_kind_name(SolverKind k) {
    switch (k) {
        case SolverKind::brute: return "brute";
        case SolverKind::anneal: return "anneal";
        case SolverKind::tabu: return "tabu";
        case SolverKind::bcd: return "bcd";
    }
    return "?";
}

const char* objective_kind_name(ObjectiveKind k) {
    return k == ObjectiveKind::quadratic ? "quadratic" : "exact";
}

void SolverConfig::validate() const {
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0))
        throw std::invalid_argument("solver: cooling_rate must be in (0, 1)");
    if (tabu_tenure < 1) throw std::invalid_argument("solver: tabu_tenure must be >= 1");
    if (restarts < 1) throw std::invalid_argument("solver: restarts must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    if (!(initial_temp >= 0.0)) throw std::invalid_argument("solver: initial_temp must be >= 0");
}

SolverResult brute_force(const Objective& objective) {
    const std::size_t dim = objective.dim();
    if (dim > kBruteForceMaxDim)
        throw std::invalid_argument("brute_force: refusing " + std::to_string(dim) +
                                    " variables (cap is " + std::to_string(kBruteForceMaxDim) + ")");
    Tracker tr(objective);
    std::vector<std::uint8_t> zero(dim, 0);
    auto w = objective.walker(zero);
    tr.consider(*w);
    tr.mark(0);
    const std::uint64_t total = std::uint64_t{1} << dim;
    for (std::uint64_t s = 1; s < total; ++s) {
        w->flip(static_cast<std::size_t>(std::countr_zero(s)));
        tr.consider(*w);
        tr.mark(s);
    }
    tr.result().evaluations = total;
    return tr.finish();
}

SolverResult simulated_annealing(const Objective& objective, const SolverConfig& cfg) {
    cfg.validate();
    const std::size_t dim = objective.dim();
    Rng rng(cfg.seed);
    Tracker tr(objective);
    std::size_t evals = 0;
    const double t0 = cfg.initial_temp > 0.0 ? cfg.initial_temp : auto_temperature(objective, rng, evals);
    boost::random::uniform_01<double> u01;
    std::size_t sweep_counter = 0;

    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        auto w = objective.walker(random_bits(rng, dim));
        ++evals;
        tr.consider(*w);
        if (dim == 0) {
            tr.mark(sweep_counter++);
            continue;
        }
        boost::random::uniform_int_distribution<std::size_t> pick(0, dim - 1);
        double t = t0;
        for (std::size_t sweep = 0; sweep < cfg.max_iters; ++sweep) {
            for (std::size_t p = 0; p < dim; ++p) {
                const std::size_t i = pick(rng);
                const double d = w->delta(i);
                ++evals;
                const double u = u01(rng);
                if (d <= 0.0 || (t > 0.0 && u < std::exp(-d / t))) {
                    w->flip(i);
                    tr.consider(*w);
                }
            }
            t *= cfg.cooling_rate;
            tr.mark(sweep_counter++);
        }
    }
    tr.result().evaluations = evals;
    return tr.finish();
}

SolverResult tabu_search(const Objective& objective, const SolverConfig& cfg) {
    cfg.validate();
    const std::size_t dim = objective.dim();
    Rng rng(cfg.seed);
    Tracker tr(objective);
    std::size_t evals = 0;
    std::size_t iteration = 0;
    constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        auto w = objective.walker(r == 0 ? std::vector<std::uint8_t>(dim, 0) : random_bits(rng, dim));
        ++evals;
        tr.consider(*w);
        tr.mark(iteration++);
        if (dim == 0) continue;
        std::vector<std::size_t> last(dim, kNever);
        for (std::size_t it = 0; it < cfg.max_iters; ++it) {
            std::size_t move = kNever;
            double move_d = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double d = w->delta(i);
                ++evals;
                const bool tabu = last[i] != kNever && it - last[i] < cfg.tabu_tenure;
                const double cand = w->value() + d;
                const bool aspiration = cand < tr.best() && !nearly_equal(cand, tr.best());
                if ((!tabu || aspiration) && (move == kNever || d < move_d)) {
                    move = i;
                    move_d = d;
                }
            }
            if (move == kNever) {
                move = static_cast<std::size_t>(std::min_element(last.begin(), last.end()) - last.begin());
            }
            w->flip(move);
            last[move] = it;
            tr.consider(*w);
            tr.mark(iteration++);
        }
    }
    tr.result().evaluations = evals;
    return tr.finish();
}

SolverResult block_coordinate_descent(const ExactObjective& objective, const SolverConfig& cfg,
                                      std::span<const std::uint8_t> start) {
    cfg.validate();
    const BitLayout& l = objective.layout();
    std::vector<std::uint8_t> x = start.empty() ? std::vector<std::uint8_t>(l.dim(), 0)
                                                : std::vector<std::uint8_t>(start.begin(), start.end());
    check_length(x.size(), l.dim(), "block_coordinate_descent");
    Tracker tr(objective);
    const std::uint32_t lq_count = 1u << l.bits(Band::quantum);
    const std::uint32_t lc_count = 1u << l.bits(Band::classical);
    std::size_t evals = 1;
    std::size_t step = 0;

    auto hq = objective.band_sum(Band::quantum, x);
    auto hc = objective.band_sum(Band::classical, x);
    double value = objective.cost_from_sums(hq, hc);
    tr.consider(x, value, [&] { return objective.feasible_from_sum(hq); });
    tr.mark(step++);

    for (std::size_t sweep = 0; sweep < cfg.max_iters; ++sweep) {
        bool changed = false;
        hq = objective.band_sum(Band::quantum, x);
        hc = objective.band_sum(Band::classical, x);
        value = objective.cost_from_sums(hq, hc);
        for (std::size_t e = 0; e < l.n_elements(); ++e) {
            const std::uint32_t cur_q = l.level(x, e, Band::quantum);
            const std::uint32_t cur_c = l.level(x, e, Band::classical);
            const auto base_q = hq - objective.contribution(Band::quantum, e, cur_q);
            const auto base_c = hc - objective.contribution(Band::classical, e, cur_c);
            std::uint32_t best_q = cur_q, best_c = cur_c;
            double best = value;
            for (std::uint32_t oq = 0; oq < lq_count; ++oq) {
                for (std::uint32_t oc = 0; oc < lc_count; ++oc) {
                    const double v = objective.cost_from_sums(base_q + objective.contribution(Band::quantum, e, oq),
                                                              base_c + objective.contribution(Band::classical, e, oc));
                    ++evals;
                    if (v < best && !nearly_equal(v, best)) {
                        best = v;
                        best_q = oq;
                        best_c = oc;
                    }
                }
            }
            if (best_q != cur_q || best_c != cur_c) {
                l.set_level(x, e, Band::quantum, best_q);
                l.set_level(x, e, Band::classical, best_c);
                hq = base_q + objective.contribution(Band::quantum, e, best_q);
                hc = base_c + objective.contribution(Band::classical, e, best_c);
                value = objective.cost_from_sums(hq, hc);
                tr.consider(x, value, [&] { return objective.feasible_from_sum(hq); });
                changed = true;
            }
            tr.mark(step++);
        }
        if (!changed) break;
    }
    tr.result().evaluations = evals;
    return tr.finish();
}

SolverResult solve(const Objective& objective, const SolverConfig& cfg) {
    switch (cfg.kind) {
        case SolverKind::brute: return brute_force(objective);
        case SolverKind::anneal: return simulated_annealing(objective, cfg);
        case SolverKind::tabu: return tabu_search(objective, cfg);
        case SolverKind::bcd: {
            const auto* exact = dynamic_cast<const ExactObjective*>(&objective);
            if (!exact) throw std::invalid_argument("bcd requires the exact objective");
            return block_coordinate_descent(*exact, cfg);
        }
    }
    throw std::invalid_argument("unknown solver kind");
}

bool better_result(const SolverResult& a, const SolverResult& b) {
    return improves(a.best_value, a.best_bits, b.best_value, b.best_bits);
}

SolverResult enforce_security(SolverResult result, const ExactObjective& objective) {
    if (objective.feasible(result.best_bits)) {
        result.feasible = true;
        result.security = SecurityStatus::accepted;
    } else if (result.has_feasible && objective.feasible(result.best_feasible_bits)) {
        result.best_bits = result.best_feasible_bits;
        result.best_value = objective.evaluate(result.best_bits);
        result.feasible = true;
        result.security = SecurityStatus::fallback;
    } else {
        result.feasible = false;
        result.security = SecurityStatus::infeasible;
    }
    return result;
}

void write_trace_csv(std::ostream& os, const SolverResult& result) {
    char buf[40];
    os << "iteration,best_value\n";
    for (const auto& p : result.trace) {
        std::snprintf(buf, sizeof buf, "%.17g", p.best_value);
        os << p.iteration << ',' << buf << '\n';
    }
}

}  // namespace risqkd
