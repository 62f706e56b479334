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
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "risqkd/metrics.hpp"
#include "risqkd/qubo.hpp"
#include "risqkd/ris.hpp"

namespace risqkd {

/// Incremental view of an objective at one bit vector.
class Walker {
public:
    virtual ~Walker() = default;
    virtual double value() const = 0;
    /// Change in value if bit i were flipped.
    virtual double delta(std::size_t i) const = 0;
    virtual void flip(std::size_t i) = 0;
    virtual bool feasible() const = 0;
    std::span<const std::uint8_t> bits() const { return x_; }

protected:
    std::vector<std::uint8_t> x_;
};

class Objective {
public:
    virtual ~Objective() = default;
    virtual std::size_t dim() const = 0;
    virtual double evaluate(std::span<const std::uint8_t> x) const = 0;
    virtual bool feasible(std::span<const std::uint8_t> x) const = 0;
    virtual std::unique_ptr<Walker> walker(std::span<const std::uint8_t> x) const = 0;
};

using FeasibilityFn = std::function<bool(std::span<const std::uint8_t>)>;

/// xᵀQx + cᵀx + offset with O(degree) flips. Every vector is feasible
/// unless a predicate is supplied.
class QuadraticObjective final : public Objective {
public:
    explicit QuadraticObjective(const QuboModel& model, FeasibilityFn feasible = {});
    std::size_t dim() const override { return model_->dim(); }
    double evaluate(std::span<const std::uint8_t> x) const override;
    bool feasible(std::span<const std::uint8_t> x) const override;
    std::unique_ptr<Walker> walker(std::span<const std::uint8_t> x) const override;
    const QuboModel& model() const { return *model_; }

private:
    const QuboModel* model_;
    FeasibilityFn feasible_;
};

/// Exact joint cost with per-band running sums; flips and deltas are O(1).
/// Feasible means QBER ≤ qber_limit.
class ExactObjective final : public Objective {
public:
    ExactObjective(ChannelState state, ReceiverModel receiver, Weights weights,
                   double qber_limit = kQberSecurityLimit);

    std::size_t dim() const override { return layout_.dim(); }
    double evaluate(std::span<const std::uint8_t> x) const override;
    bool feasible(std::span<const std::uint8_t> x) const override;
    std::unique_ptr<Walker> walker(std::span<const std::uint8_t> x) const override;

    Metrics metrics(std::span<const std::uint8_t> x) const;
    std::complex<double> band_sum(Band band, std::span<const std::uint8_t> x) const;
    double cost_from_sums(std::complex<double> hq, std::complex<double> hc) const;
    bool feasible_from_sum(std::complex<double> hq) const;

    /// g_n·e^{jθ(level)} for one element.
    std::complex<double> contribution(Band band, std::size_t element, std::uint32_t level) const;

    const ChannelState& state() const { return state_; }
    const ReceiverModel& receiver() const { return receiver_; }
    const Weights& weights() const { return weights_; }
    const BitLayout& layout() const { return layout_; }
    double qber_limit() const { return qber_limit_; }

private:
    ChannelState state_;
    ReceiverModel receiver_;
    Weights weights_;
    double qber_limit_;
    BitLayout layout_;
    std::vector<std::complex<double>> table_[2];  // [band][element * levels + level]
};

enum class SolverKind { brute, anneal, tabu, bcd };
enum class ObjectiveKind { quadratic, exact };

SolverKind parse_solver_kind(const std::string& s);
ObjectiveKind parse_objective_kind(const std::string& s);
const char* solver_kind_name(SolverKind k);
const char* objective_kind_name(ObjectiveKind k);

struct SolverConfig {
    SolverKind kind = SolverKind::bcd;
    std::uint64_t seed = 1;
    std::size_t max_iters = 200;   // sweeps (anneal, bcd) or moves (tabu)
    double initial_temp = 0.0;     // 0: 10× std of F over 100 random vectors
    double cooling_rate = 0.97;
    std::size_t tabu_tenure = 7;
    std::size_t restarts = 3;
    ObjectiveKind objective = ObjectiveKind::exact;

    void validate() const;
};

struct TracePoint {
    std::size_t iteration = 0;
    double best_value = 0.0;
};

enum class SecurityStatus { unchecked, accepted, fallback, infeasible };

struct SolverResult {
    std::vector<std::uint8_t> best_bits;
    double best_value = 0.0;
    std::size_t evaluations = 0;
    bool feasible = false;
    std::vector<TracePoint> trace;

    // Best feasible state visited, if any.
    bool has_feasible = false;
    std::vector<std::uint8_t> best_feasible_bits;
    double best_feasible_value = 0.0;

    SecurityStatus security = SecurityStatus::unchecked;
};

inline constexpr std::size_t kBruteForceMaxDim = 24;

/// Exhaustive Gray-code enumeration. Ties go to the lexicographically
/// smallest vector. Throws std::invalid_argument above kBruteForceMaxDim.
SolverResult brute_force(const Objective& objective);

/// Metropolis single-flip annealing with geometric cooling per sweep of
/// dim proposals, restarted cfg.restarts times from random vectors.
SolverResult simulated_annealing(const Objective& objective, const SolverConfig& cfg);

/// Steepest single-flip descent with a recency tabu list and aspiration.
/// The first start is the zero vector, later restarts are random.
SolverResult tabu_search(const Objective& objective, const SolverConfig& cfg);

/// Element-wise exhaustive update over all 2^{b_Q}·2^{b_C} joint options,
/// sweeping in index order until a sweep changes nothing or max_iters sweeps.
SolverResult block_coordinate_descent(const ExactObjective& objective, const SolverConfig& cfg,
                                      std::span<const std::uint8_t> start = {});

/// Dispatches on cfg.kind. bcd requires an ExactObjective.
SolverResult solve(const Objective& objective, const SolverConfig& cfg);

/// Returns true when a has the smaller value, ties broken lexicographically.
bool better_result(const SolverResult& a, const SolverResult& b);

/// Marks the result feasible when QBER(x★) ≤ 0.11. Otherwise falls back to
/// the best feasible visited state, or reports SecurityStatus::infeasible.
SolverResult enforce_security(SolverResult result, const ExactObjective& objective);

/// CSV "iteration,best_value".
void write_trace_csv(std::ostream& os, const SolverResult& result);

}  // namespace risqkd
