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
#include <sstream>

#include "fixtures.hpp"
#include "risqkd/solvers.hpp"

using namespace risqkd;
using testing::bits_of;
using testing::random_bits;
using testing::random_state;
using testing::unit_receiver;

namespace {

QuboModel tie_model() {
    QuboBuilder b(2);
    b.add_linear(0, 1);
    b.add_linear(1, 1);
    b.add_quadratic(0, 1, -2);
    return b.build();
}

QuboModel random_model(std::uint64_t seed, std::size_t dim) {
    Rng rng(seed);
    boost::random::uniform_real_distribution<double> u(-1, 1);
    QuboBuilder b(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        b.add_linear(i, u(rng));
        for (std::size_t j = i + 1; j < dim; ++j) b.add_quadratic(i, j, u(rng));
    }
    b.add_offset(u(rng));
    return b.build();
}

bool non_increasing(const SolverResult& r) {
    for (std::size_t k = 1; k < r.trace.size(); ++k)
        if (r.trace[k].best_value > r.trace[k - 1].best_value) return false;
    return true;
}

bool is_local_min(const Objective& obj, const std::vector<std::uint8_t>& x) {
    auto w = obj.walker(x);
    for (std::size_t i = 0; i < obj.dim(); ++i)
        if (w->delta(i) < -1e-12) return false;
    return true;
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("brute force reference cases") {
    QuboBuilder b0(0);
    b0.add_offset(2.5);
    const QuboModel m0 = b0.build();
    const auto r0 = brute_force(QuadraticObjective(m0));
    CHECK(r0.best_bits.empty());
    CHECK(r0.best_value == 2.5);

    const QuboModel m = tie_model();
    const auto r = brute_force(QuadraticObjective(m));
    CHECK(r.best_bits == std::vector<std::uint8_t>{0, 0});
    CHECK(r.best_value == 0.0);
    CHECK(r.evaluations == 4);

    QuboBuilder b1(1);
    b1.add_linear(0, -1);
    b1.add_offset(0.25);
    const QuboModel m1 = b1.build();
    const auto r1 = brute_force(QuadraticObjective(m1));
    CHECK(r1.best_bits == std::vector<std::uint8_t>{1});
    CHECK(r1.best_value == -0.75);
}

TEST_CASE("brute force refuses large problems") {
    const QuboModel m = QuboBuilder(25).build();
    CHECK_THROWS_WITH_AS(brute_force(QuadraticObjective(m)), doctest::Contains("cap"), std::invalid_argument);
}

TEST_CASE("walkers track full evaluation") {
    const QuboModel m = random_model(3, 12);
    const QuadraticObjective q(m);
    const ExactObjective e(random_state(4, 3), unit_receiver(), static_weights({}));
    for (const Objective* obj : {static_cast<const Objective*>(&q), static_cast<const Objective*>(&e)}) {
        Rng rng(11);
        auto x = random_bits(rng, obj->dim());
        auto w = obj->walker(x);
        boost::random::uniform_int_distribution<std::size_t> pick(0, obj->dim() - 1);
        for (int k = 0; k < 3000; ++k) {
            const std::size_t i = pick(rng);
            const double before = w->value();
            const double d = w->delta(i);
            w->flip(i);
            x[i] ^= 1u;
            CHECK(w->value() == doctest::Approx(before + d).epsilon(1e-12).scale(1e-3));
        }
        CHECK(w->value() == doctest::Approx(obj->evaluate(x)).epsilon(1e-12).scale(1e-3));
        CHECK(std::vector<std::uint8_t>(w->bits().begin(), w->bits().end()) == x);
    }
}

TEST_CASE("exact objective agrees with eval_exact") {
    const ChannelState s = random_state(21, 4);
    const auto rx = unit_receiver();
    const Weights w = static_weights({});
    const ExactObjective obj(s, rx, w);
    Rng rng(2);
    for (int k = 0; k < 50; ++k) {
        const auto x = random_bits(rng, obj.dim());
        CHECK(obj.evaluate(x) == doctest::Approx(eval_exact(s, rx, w, x)).epsilon(1e-13));
    }
}

TEST_CASE("simulated annealing is deterministic and greedy at zero temperature") {
    const QuboModel m = random_model(9, 14);
    const QuadraticObjective q(m);
    SolverConfig cfg;
    cfg.kind = SolverKind::anneal;
    cfg.seed = 1234;
    const auto a = simulated_annealing(q, cfg);
    const auto b = simulated_annealing(q, cfg);
    CHECK(a.best_bits == b.best_bits);
    CHECK(a.best_value == b.best_value);
    CHECK(a.evaluations == b.evaluations);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) CHECK(a.trace[k].best_value == b.trace[k].best_value);
    CHECK(non_increasing(a));
    CHECK(a.best_value == doctest::Approx(q.evaluate(a.best_bits)).epsilon(1e-12));

    cfg.initial_temp = 1e-300;
    cfg.restarts = 1;
    const auto g = simulated_annealing(q, cfg);
    CHECK(non_increasing(g));
    CHECK(is_local_min(q, g.best_bits));
}

TEST_CASE("tabu search termination and separable models") {
    const QuboModel m = tie_model();
    SolverConfig cfg;
    cfg.kind = SolverKind::tabu;
    cfg.tabu_tenure = 5;
    cfg.max_iters = 50;
    cfg.restarts = 1;
    const auto r = tabu_search(QuadraticObjective(m), cfg);
    CHECK_FALSE(r.trace.empty());
    CHECK(r.best_value == 0.0);
    CHECK(non_increasing(r));

    const std::vector<double> c{0.5, -1.0, 2.0, -0.25, -3.0, 1e-3, -1e-3};
    QuboBuilder b(c.size());
    double optimum = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        b.add_linear(i, c[i]);
        optimum += std::min(c[i], 0.0);
    }
    const QuboModel sep = b.build();
    cfg.max_iters = c.size();
    cfg.tabu_tenure = 3;
    const auto rs = tabu_search(QuadraticObjective(sep), cfg);
    CHECK(rs.best_value == doctest::Approx(optimum).epsilon(1e-14));
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(rs.best_bits[i] == (c[i] < 0 ? 1 : 0));
}

TEST_CASE("block coordinate descent") {
    const auto rx = unit_receiver();
    const Weights w = static_weights({});
    SolverConfig cfg;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ExactObjective one(random_state(seed, 1), rx, w);
        const auto bf = brute_force(one);
        const auto bcd = block_coordinate_descent(one, cfg);
        CHECK(bcd.best_value == doctest::Approx(bf.best_value).epsilon(1e-12));

        const ExactObjective three(random_state(seed + 50, 3), rx, w);
        const auto r = block_coordinate_descent(three, cfg);
        CHECK(non_increasing(r));
        CHECK(r.best_value == doctest::Approx(three.evaluate(r.best_bits)).epsilon(1e-12));
        CHECK(r.best_value >= brute_force(three).best_value - 1e-15);
    }
    const QuboModel m = tie_model();
    cfg.kind = SolverKind::bcd;
    CHECK_THROWS_AS(solve(QuadraticObjective(m), cfg), std::invalid_argument);
}

TEST_CASE("every solver returns a re-scored value and never beats the oracle") {
    const auto rx = unit_receiver();
    const Weights w = static_weights({});
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const ExactObjective obj(random_state(seed, 3), rx, w);
        const auto oracle = brute_force(obj);
        for (SolverKind k : {SolverKind::anneal, SolverKind::tabu, SolverKind::bcd}) {
            SolverConfig cfg;
            cfg.kind = k;
            cfg.seed = seed;
            const auto r = solve(obj, cfg);
            CHECK(std::abs(r.best_value - obj.evaluate(r.best_bits)) <= 1e-12 * std::abs(r.best_value));
            CHECK(r.best_value >= oracle.best_value - 1e-12 * std::abs(oracle.best_value));
            CHECK(non_increasing(r));
        }
    }
}

TEST_CASE("brute force argmin is reproducible") {
    const ExactObjective obj(random_state(8, 4), unit_receiver(), static_weights({}));
    const auto a = brute_force(obj), b = brute_force(obj);
    CHECK(a.best_bits == b.best_bits);
    CHECK(a.best_value == b.best_value);
}

TEST_CASE("security enforcement") {
    const Weights w = static_weights({});
    OpticalParams o;
    RfParams rf;
    auto objective_with_qber = [&](double target, double limit) {
        Calibration cal;
        cal.reference_power = 1e-12;  // h ≈ 1 at unit power
        cal.effective_visibility = 1.0 - 2.0 * (target - o.dark_count_prob);
        ChannelState s;
        s.direct_quantum = {1.0, 0.0};
        s.direct_classical = {1.0, 0.0};
        return ExactObjective(s, ReceiverModel::calibrated(o, rf, cal), w, limit);
    };
    SolverResult r;
    const auto good = objective_with_qber(0.007, kQberSecurityLimit);
    CHECK(good.metrics({}).qber == doctest::Approx(0.007));
    CHECK(enforce_security(r, good).feasible);
    CHECK(enforce_security(r, good).security == SecurityStatus::accepted);

    const auto bad = objective_with_qber(0.12, kQberSecurityLimit);
    CHECK_FALSE(enforce_security(r, bad).feasible);
    CHECK(enforce_security(r, bad).security == SecurityStatus::infeasible);

    // Boundary: ε equal to the limit is accepted.
    const auto probe = objective_with_qber(0.11, kQberSecurityLimit);
    const double q = probe.metrics({}).qber;
    CHECK(enforce_security(r, objective_with_qber(0.11, q)).feasible);
    CHECK_FALSE(enforce_security(r, objective_with_qber(0.11, std::nextafter(q, 0.0))).feasible);
}

TEST_CASE("security falls back to the best feasible visited state") {
    // Rewarding QBER makes the anti-aligned element optimal but insecure.
    ChannelState s;
    s.direct_quantum = {1.0, 0.0};
    s.direct_classical = {1.0, 0.0};
    s.cascade_quantum = {{0.5, 0.0}};
    s.cascade_classical = {{0.1, 0.0}};
    s.bits_quantum = s.bits_classical = 1;
    const auto rx = unit_receiver();
    const Weights w{-1.0, 0.0};
    const double limit = rx.qber(2.25);  // aligned: |1 + 0.5|²
    const ExactObjective obj(s, rx, w, limit);
    const auto r = brute_force(obj);
    CHECK(r.best_bits[0] == 1);
    CHECK_FALSE(r.feasible);
    REQUIRE(r.has_feasible);
    const auto e = enforce_security(r, obj);
    CHECK(e.feasible);
    CHECK(e.security == SecurityStatus::fallback);
    CHECK(e.best_bits[0] == 0);
    CHECK(e.best_value == doctest::Approx(obj.evaluate(e.best_bits)));
}

TEST_CASE("config validation and names") {
    SolverConfig cfg;
    cfg.cooling_rate = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.tabu_tenure = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK(parse_solver_kind("tabu") == SolverKind::tabu);
    CHECK(std::string(solver_kind_name(SolverKind::anneal)) == "anneal");
    CHECK(parse_objective_kind("quadratic") == ObjectiveKind::quadratic);
    CHECK_THROWS_AS(parse_solver_kind("qaoa"), std::invalid_argument);
}

TEST_CASE("trace csv") {
    const auto r = brute_force(QuadraticObjective(tie_model()));
    std::ostringstream os;
    write_trace_csv(os, r);
    CHECK(os.str().rfind("iteration,best_value\n0,", 0) == 0);
}

TEST_CASE("better_result breaks ties lexicographically") {
    SolverResult a, b;
    a.best_value = b.best_value = 1.0;
    a.best_bits = {0, 1};
    b.best_bits = {1, 0};
    CHECK(better_result(a, b));
    CHECK_FALSE(better_result(b, a));
    b.best_value = 0.5;
    CHECK(better_result(b, a));
}

}
