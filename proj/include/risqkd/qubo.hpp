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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "risqkd/metrics.hpp"
#include "risqkd/ris.hpp"

namespace risqkd {

/// One off-diagonal term value·x_i·x_j with i < j. In symmetric-matrix form
/// this is Q_ij = Q_ji = value / 2.
struct Interaction {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double value = 0.0;
};

/// Binary quadratic model F(x) = xᵀQx + cᵀx + offset over x ∈ {0,1}^dim.
/// Diagonal terms are folded into the linear vector (x² = x). Immutable once
/// built; safe to share between threads.
class QuboModel {
public:
    QuboModel() = default;

    std::size_t dim() const { return linear_.size(); }
    double offset() const { return offset_; }
    std::span<const double> linear() const { return linear_; }
    /// Sorted by (i, j); zero terms are dropped.
    std::span<const Interaction> interactions() const { return interactions_; }
    const BitLayout& layout() const { return layout_; }

    /// Symmetric matrix entry Q_ij (0 on the diagonal; see linear()).
    double coefficient(std::size_t i, std::size_t j) const;

    struct Neighbor {
        std::uint32_t index;
        double value;
    };
    /// Interactions touching variable i, each listed from both ends.
    std::span<const Neighbor> neighbors(std::size_t i) const;

private:
    friend class QuboBuilder;
    std::vector<double> linear_;
    std::vector<Interaction> interactions_;
    std::vector<std::size_t> row_start_;
    std::vector<Neighbor> adjacency_;
    double offset_ = 0.0;
    BitLayout layout_;
};

/// Accumulates polynomial terms and produces a QuboModel.
class QuboBuilder {
public:
    explicit QuboBuilder(std::size_t dim, BitLayout layout = {});

    void add_offset(double v) { offset_ += v; }
    void add_linear(std::size_t i, double v);
    /// i == j folds into the linear term.
    void add_quadratic(std::size_t i, std::size_t j, double v);

    /// `constant + Σ weight·x_index`.
    struct Affine {
        double constant = 0.0;
        std::vector<std::pair<std::size_t, double>> terms;
    };
    void add_affine(double scale, const Affine& expr);
    void add_affine_square(double scale, const Affine& expr);

    QuboModel build() const;

private:
    double& upper(std::size_t i, std::size_t j);

    std::size_t dim_;
    BitLayout layout_;
    double offset_ = 0.0;
    std::vector<double> linear_;
    std::vector<double> dense_;  // row-major upper triangle, i < j
};

/// Variable index of bit k of element n in the given band (zero-based).
std::size_t index_of(const BitLayout& layout, std::size_t element, Band band, int bit);

/// xᵀQx + cᵀx + offset. Throws std::invalid_argument on a length mismatch.
double eval_quadratic(const QuboModel& model, std::span<const std::uint8_t> x);

/// Exact joint cost: decode → composite gains → receiver metrics → F.
double eval_exact(const ChannelState& state, const ReceiverModel& receiver, const Weights& weights,
                  std::span<const std::uint8_t> x);

/// Quadratic surrogate of the joint cost around `expansion_point` (all zeros
/// when empty). Every cos(u0 + δ) in |H_Q^tot|² and |H_C^tot|² is replaced by
/// cos u0 − sin u0·δ − ½cos u0·δ²; ε(P_Q) and log2(1 + Γ(P_C)) are
/// linearized around the powers at the expansion point, so the model is exact
/// there.
QuboModel build_qubo(const ChannelState& state, const ReceiverModel& receiver,
                     const Weights& weights, std::span<const std::uint8_t> expansion_point = {});

struct ExpansionReport {
    double max_relative_deviation = 0.0;
    double mean_relative_deviation = 0.0;
    double max_absolute_deviation = 0.0;
    std::size_t samples = 0;
};

/// Compares eval_quadratic against eval_exact on `samples` uniformly drawn
/// bit vectors. Relative deviation is |quad − exact| / (|exact| + guard) with
/// guard = DBL_EPSILON·max(1, |F(x0)|).
ExpansionReport expansion_error(const ChannelState& state, const ReceiverModel& receiver,
                                const Weights& weights, std::size_t samples, std::uint64_t seed,
                                std::span<const std::uint8_t> expansion_point = {});

struct QuboFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sparse triplet text format:
///   # comment lines
///   qubo <dim> <n_linear> <n_quadratic> <offset>
///   i i value      (linear terms)
///   i j value      (i < j, quadratic terms)
/// Zero-based indices; values printed with 17 significant digits.
void write_qubo(std::ostream& os, const QuboModel& model);
QuboModel read_qubo(std::istream& is);

}  // namespace risqkd
