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

#include "risqkd/qubo.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include <boost/random/uniform_int_distribution.hpp>

#include "risqkd/rng.hpp"

namespace risqkd {

double QuboModel::coefficient(std::size_t i, std::size_t j) const {
    if (i >= dim() || j >= dim()) throw std::out_of_range("QuboModel::coefficient: index out of range");
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(interactions_.begin(), interactions_.end(), std::pair{i, j},
                               [](const Interaction& t, const std::pair<std::size_t, std::size_t>& k) {
                                   return std::pair<std::size_t, std::size_t>{t.i, t.j} < k;
                               });
    if (it == interactions_.end() || it->i != i || it->j != j) return 0.0;
    return it->value / 2.0;
}

std::span<const QuboModel::Neighbor> QuboModel::neighbors(std::size_t i) const {
    if (i >= dim()) throw std::out_of_range("QuboModel::neighbors: index out of range");
    return {adjacency_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

QuboBuilder::QuboBuilder(std::size_t dim, BitLayout layout)
    : dim_(dim), layout_(layout), linear_(dim, 0.0), dense_(dim < 2 ? 0 : dim * (dim - 1) / 2, 0.0) {}

double& QuboBuilder::upper(std::size_t i, std::size_t j) {
    // Row i holds columns i+1..dim-1.
    const std::size_t row = i * dim_ - i * (i + 1) / 2;
    return dense_[row + (j - i - 1)];
}

void QuboBuilder::add_linear(std::size_t i, double v) {
    if (i >= dim_) throw std::out_of_range("QuboBuilder: index out of range");
    linear_[i] += v;
}

void QuboBuilder::add_quadratic(std::size_t i, std::size_t j, double v) {
    if (i >= dim_ || j >= dim_) throw std::out_of_range("QuboBuilder: index out of range");
    if (i == j) {
        linear_[i] += v;
        return;
    }
    if (i > j) std::swap(i, j);
    upper(i, j) += v;
}

void QuboBuilder::add_affine(double scale, const Affine& expr) {
    offset_ += scale * expr.constant;
    for (const auto& [i, w] : expr.terms) add_linear(i, scale * w);
}

void QuboBuilder::add_affine_square(double scale, const Affine& expr) {
    const double c = expr.constant;
    offset_ += scale * c * c;
    const auto& t = expr.terms;
    for (std::size_t a = 0; a < t.size(); ++a) {
        add_linear(t[a].first, scale * (2.0 * c * t[a].second + t[a].second * t[a].second));
        for (std::size_t b = a + 1; b < t.size(); ++b)
            add_quadratic(t[a].first, t[b].first, scale * 2.0 * t[a].second * t[b].second);
    }
}

QuboModel QuboBuilder::build() const {
    QuboModel m;
    m.linear_ = linear_;
    m.offset_ = offset_;
    m.layout_ = layout_;
    std::vector<std::size_t> degree(dim_, 0);
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t row = i * dim_ - i * (i + 1) / 2;
        for (std::size_t j = i + 1; j < dim_; ++j) {
            const double v = dense_[row + (j - i - 1)];
            if (v == 0.0) continue;
            m.interactions_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), v});
            ++degree[i];
            ++degree[j];
        }
    }
    m.row_start_.assign(dim_ + 1, 0);
    for (std::size_t i = 0; i < dim_; ++i) m.row_start_[i + 1] = m.row_start_[i] + degree[i];
    m.adjacency_.resize(m.row_start_[dim_]);
    std::vector<std::size_t> fill(m.row_start_.begin(), m.row_start_.end() - 1);
    for (const auto& t : m.interactions_) {
        m.adjacency_[fill[t.i]++] = {t.j, t.value};
        m.adjacency_[fill[t.j]++] = {t.i, t.value};
    }
    return m;
}

std::size_t index_of(const BitLayout& layout, std::size_t element, Band band, int bit) {
    return layout.index_of(element, band, bit);
}

double eval_quadratic(const QuboModel& model, std::span<const std::uint8_t> x) {
    if (x.size() != model.dim())
        throw std::invalid_argument("eval_quadratic: expected " + std::to_string(model.dim()) +
                                    " bits, got " + std::to_string(x.size()));
    double acc = 0.0;
    const auto c = model.linear();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) acc += c[i];
    for (const auto& t : model.interactions())
        if (x[t.i] && x[t.j]) acc += t.value;
    return acc + model.offset();
}

namespace {

double band_power(const ChannelState& state, Band band, std::span<const double> phases) {
    return composite_gain(state.direct(band), state.cascades(band), phases).power();
}

std::vector<std::uint8_t> expansion_bits(const BitLayout& layout, std::span<const std::uint8_t> x0) {
    if (x0.empty()) return std::vector<std::uint8_t>(layout.dim(), 0);
    if (x0.size() != layout.dim())
        throw std::invalid_argument("build_qubo: expansion point has wrong length");
    return {x0.begin(), x0.end()};
}

// Adds coef·[cos u0 − sin u0·δ − ½cos u0·δ²].
void add_cos_taylor(QuboBuilder& b, double coef, double u0, const QuboBuilder::Affine& delta) {
    const double cu = std::cos(u0);
    const double su = std::sin(u0);
    b.add_offset(coef * cu);
    b.add_affine(-coef * su, delta);
    b.add_affine_square(-0.5 * coef * cu, delta);
}

void add_band(QuboBuilder& b, const ChannelState& state, const BitLayout& layout, Band band,
              std::span<const double> phases0, double slope) {
    const auto& cascades = state.cascades(band);
    const bool any = std::any_of(cascades.begin(), cascades.end(),
                                 [](const ComplexGain& g) { return g.amplitude != 0.0; });
    if (!any || slope == 0.0) return;

    const ComplexGain& direct = state.direct(band);
    const double norm = direct.amplitude > 0.0 ? direct.amplitude : 1.0;
    const double d = direct.amplitude / norm;
    const double k = slope * norm * norm;  // d cost / d(normalized power)
    const double p0 = band_power(state, band, phases0) / (norm * norm);
    b.add_offset(-k * p0);

    const std::size_t n = cascades.size();
    const int bits = layout.bits(band);
    const double step = kTwoPi / static_cast<double>(1u << bits);
    std::vector<double> u(n);
    std::vector<QuboBuilder::Affine> delta(n);
    double constant = d * d;
    for (std::size_t e = 0; e < n; ++e) {
        u[e] = cascades[e].amplitude / norm;
        constant += u[e] * u[e];
        delta[e].constant = -phases0[e];
        for (int kb = 0; kb < bits; ++kb)
            delta[e].terms.emplace_back(layout.index_of(e, band, kb), step * static_cast<double>(1u << kb));
    }
    b.add_offset(k * constant);

    if (d > 0.0) {
        for (std::size_t e = 0; e < n; ++e) {
            if (u[e] == 0.0) continue;
            const double u0 = cascades[e].phase_rad + phases0[e] - direct.phase_rad;
            add_cos_taylor(b, 2.0 * k * d * u[e], u0, delta[e]);
        }
    }

    QuboBuilder::Affine diff;
    for (std::size_t m = 0; m < n; ++m) {
        if (u[m] == 0.0) continue;
        for (std::size_t e = m + 1; e < n; ++e) {
            if (u[e] == 0.0) continue;
            const double u0 = cascades[m].phase_rad - cascades[e].phase_rad + phases0[m] - phases0[e];
            diff.constant = delta[m].constant - delta[e].constant;
            diff.terms = delta[m].terms;
            for (const auto& [i, w] : delta[e].terms) diff.terms.emplace_back(i, -w);
            add_cos_taylor(b, 2.0 * k * u[m] * u[e], u0, diff);
        }
    }
}

}  // namespace

double eval_exact(const ChannelState& state, const ReceiverModel& receiver, const Weights& weights,
                  std::span<const std::uint8_t> x) {
    const BitLayout layout = state.layout();
    const PhaseConfig p = decode_phases(x, layout);
    return receiver.cost(band_power(state, Band::quantum, p.phases_quantum),
                         band_power(state, Band::classical, p.phases_classical), weights);
}

QuboModel build_qubo(const ChannelState& state, const ReceiverModel& receiver,
                     const Weights& weights, std::span<const std::uint8_t> expansion_point) {
    state.validate();
    const BitLayout layout = state.layout();
    const std::vector<std::uint8_t> x0 = expansion_bits(layout, expansion_point);
    const PhaseConfig p0 = decode_phases(x0, layout);
    const double pq = band_power(state, Band::quantum, p0.phases_quantum);
    const double pc = band_power(state, Band::classical, p0.phases_classical);

    QuboBuilder b(layout.dim(), layout);
    b.add_offset(receiver.cost(pq, pc, weights));
    add_band(b, state, layout, Band::quantum, p0.phases_quantum, weights.alpha * receiver.qber_slope(pq));
    add_band(b, state, layout, Band::classical, p0.phases_classical,
             -weights.beta * receiver.spectral_efficiency_slope(pc));
    return b.build();
}

ExpansionReport expansion_error(const ChannelState& state, const ReceiverModel& receiver,
                                const Weights& weights, std::size_t samples, std::uint64_t seed,
                                std::span<const std::uint8_t> expansion_point) {
    if (samples == 0) throw std::invalid_argument("expansion_error: samples must be >= 1");
    const QuboModel model = build_qubo(state, receiver, weights, expansion_point);
    const std::vector<std::uint8_t> x0 = expansion_bits(state.layout(), expansion_point);
    const double guard = DBL_EPSILON * std::max(1.0, std::abs(eval_exact(state, receiver, weights, x0)));

    Rng rng(seed);
    boost::random::uniform_int_distribution<int> coin(0, 1);
    std::vector<std::uint8_t> x(model.dim());
    ExpansionReport r;
    r.samples = samples;
    double sum = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& bit : x) bit = static_cast<std::uint8_t>(coin(rng));
        const double exact = eval_exact(state, receiver, weights, x);
        const double abs_dev = std::abs(eval_quadratic(model, x) - exact);
        const double rel = abs_dev / (std::abs(exact) + guard);
        r.max_relative_deviation = std::max(r.max_relative_deviation, rel);
        r.max_absolute_deviation = std::max(r.max_absolute_deviation, abs_dev);
        sum += rel;
    }
    r.mean_relative_deviation = sum / static_cast<double>(samples);
    return r;
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

double parse_value(const std::string& tok, std::size_t line_no) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw QuboFormatError("qubo line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    return v;
}

std::size_t parse_index(const std::string& tok, std::size_t line_no) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw QuboFormatError("qubo line " + std::to_string(line_no) + ": bad index '" + tok + "'");
    return std::stoull(tok);
}

}  // namespace

void write_qubo(std::ostream& os, const QuboModel& model) {
    const auto lin = model.linear();
    const std::size_t n_linear =
        static_cast<std::size_t>(std::count_if(lin.begin(), lin.end(), [](double v) { return v != 0.0; }));
    const BitLayout& l = model.layout();
    os << "# risqkd binary quadratic model: F(x) = sum_i c_i x_i + sum_{i<j} J_ij x_i x_j + offset\n";
    os << "# layout " << l.n_elements() << ' ' << l.bits(Band::quantum) << ' ' << l.bits(Band::classical)
       << '\n';
    os << "qubo " << model.dim() << ' ' << n_linear << ' ' << model.interactions().size() << ' '
       << format_value(model.offset()) << '\n';
    for (std::size_t i = 0; i < lin.size(); ++i)
        if (lin[i] != 0.0) os << i << ' ' << i << ' ' << format_value(lin[i]) << '\n';
    for (const auto& t : model.interactions())
        os << t.i << ' ' << t.j << ' ' << format_value(t.value) << '\n';
}

QuboModel read_qubo(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t dim = 0, n_linear = 0, n_quad = 0, seen_linear = 0, seen_quad = 0;
    double offset = 0.0;
    BitLayout layout;
    std::vector<std::pair<std::size_t, double>> linear;
    std::vector<Interaction> quad;

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (first[0] == '#') {
            std::string key;
            if (first == "#" && (ss >> key) && key == "layout") {
                std::size_t n = 0;
                int bq = 0, bc = 0;
                if (ss >> n >> bq >> bc) layout = BitLayout(n, bq, bc);
            }
            continue;
        }
        std::vector<std::string> tok{first};
        for (std::string t; ss >> t;) tok.push_back(t);
        if (!have_header) {
            if (tok.size() != 5 || tok[0] != "qubo")
                throw QuboFormatError("qubo line " + std::to_string(line_no) + ": expected header");
            dim = parse_index(tok[1], line_no);
            n_linear = parse_index(tok[2], line_no);
            n_quad = parse_index(tok[3], line_no);
            offset = parse_value(tok[4], line_no);
            have_header = true;
            continue;
        }
        if (tok.size() != 3)
            throw QuboFormatError("qubo line " + std::to_string(line_no) + ": expected 'i j value'");
        const std::size_t i = parse_index(tok[0], line_no);
        const std::size_t j = parse_index(tok[1], line_no);
        const double v = parse_value(tok[2], line_no);
        if (i >= dim || j >= dim)
            throw QuboFormatError("qubo line " + std::to_string(line_no) + ": index out of range");
        if (i > j) throw QuboFormatError("qubo line " + std::to_string(line_no) + ": requires i <= j");
        if (i == j) {
            linear.emplace_back(i, v);
            ++seen_linear;
        } else {
            quad.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), v});
            ++seen_quad;
        }
    }
    if (!have_header) throw QuboFormatError("qubo: missing header");
    if (seen_linear != n_linear || seen_quad != n_quad)
        throw QuboFormatError("qubo: term counts do not match header");
    if (layout.dim() != dim) layout = BitLayout();

    QuboBuilder b(dim, layout);
    b.add_offset(offset);
    std::vector<std::uint8_t> seen(dim, 0);
    for (const auto& [i, v] : linear) {
        if (seen[i]++) throw QuboFormatError("qubo: duplicate linear term " + std::to_string(i));
        b.add_linear(i, v);
    }
    std::sort(quad.begin(), quad.end(),
              [](const Interaction& a, const Interaction& c) { return std::tie(a.i, a.j) < std::tie(c.i, c.j); });
    for (std::size_t k = 0; k < quad.size(); ++k) {
        if (k > 0 && quad[k].i == quad[k - 1].i && quad[k].j == quad[k - 1].j)
            throw QuboFormatError("qubo: duplicate quadratic term");
        b.add_quadratic(quad[k].i, quad[k].j, quad[k].value);
    }
    return b.build();
}

}  // namespace risqkd
