#include <doctest.h>

#include "drspp/ambiguity.hpp"
#include "drspp/errors.hpp"
#include "drspp/solver.hpp"

#include <cmath>
#include <optional>
#include <random>

using namespace drspp;

namespace {

constexpr int kGrid = 1000;

/// Expectation bounds over distributions supported on the grid k / 1000. Interval endpoints on
/// multiples of 0.05 make the grid exact for closed intervals and within 1e-3 otherwise.
std::optional<ExpectationBounds> grid_oracle(const std::vector<ProbabilityConstraint>& cons) {
    auto solve = [&](ObjectiveSense sense) -> std::optional<double> {
        LinearProgram lp;
        lp.sense = sense;
        std::vector<Term> total;
        for (int k = 0; k <= kGrid; ++k) {
            const double x = double(k) / kGrid;
            lp.add_variable("p" + std::to_string(k), 0.0, kInf, x);
            total.push_back({k, 1.0});
        }
        lp.add_row(total, RowSense::Equal, 1.0);
        for (const ProbabilityConstraint& c : cons) {
            std::vector<Term> in;
            for (int k = 0; k <= kGrid; ++k) {
                const double x = double(k) / kGrid;
                if (x >= c.l - 1e-12 && x <= c.u + 1e-12) {
                    in.push_back({k, 1.0});
                }
            }
            if (c.q_lo > 0.0) {
                lp.add_row(in, RowSense::GreaterEqual, c.q_lo);
            }
            if (c.q_hi < 1.0) {
                lp.add_row(in, RowSense::LessEqual, c.q_hi);
            }
        }
        const LpOutcome out = solve_lp(lp);
        if (out.status != LpStatus::Optimal) {
            return std::nullopt;
        }
        return out.objective;
    };
    const auto lo = solve(ObjectiveSense::Minimize);
    const auto hi = solve(ObjectiveSense::Maximize);
    if (!lo || !hi) {
        return std::nullopt;
    }
    return ExpectationBounds{*lo, *hi};
}

double on_grid(std::mt19937_64& rng, int steps) {
    return std::uniform_int_distribution<int>(0, steps)(rng) / double(steps);
}

} // namespace

TEST_CASE("bounds under one probability constraint") {
    const ProbabilityConstraint support{0, 0.0, 1.0, 1.0, 1.0};
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const ExpectationBounds at_most = marginal_expectation_bounds({support, {0, 0.5, 1.0, 0.0, q}});
        CHECK(std::abs(at_most.upper - (0.5 * q + 0.5)) <= 1e-9);
        CHECK(std::abs(at_most.lower) <= 1e-9);
        const ExpectationBounds at_least = marginal_expectation_bounds({support, {0, 0.5, 1.0, q, 1.0}});
        CHECK(std::abs(at_least.lower - 0.5 * q) <= 1e-9);
        CHECK(std::abs(at_least.upper - 1.0) <= 1e-9);
    }
}

TEST_CASE("bounds match a discretized distribution oracle") {
    std::mt19937_64 rng(2024);
    int infeasible = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const double sl = on_grid(rng, 4) * 0.5;
        const double su = 0.5 + on_grid(rng, 4) * 0.5;
        std::vector<ProbabilityConstraint> cons{{0, sl, su, 1.0, 1.0}};
        const int extra = 1 + rep % 3;
        for (int k = 0; k < extra; ++k) {
            double l = on_grid(rng, 20);
            double u = on_grid(rng, 20);
            if (l > u) {
                std::swap(l, u);
            }
            const double q = on_grid(rng, 20);
            if (rng() % 2 == 0) {
                cons.push_back({0, l, u, 0.0, q});
            } else {
                cons.push_back({0, l, u, q, 1.0});
            }
        }
        const auto oracle = grid_oracle(cons);
        if (!oracle) {
            ++infeasible;
            CHECK_THROWS_AS(marginal_expectation_bounds(cons), InfeasibleAmbiguity);
            continue;
        }
        const ExpectationBounds b = marginal_expectation_bounds(cons);
        CHECK(b.lower <= oracle->lower + 1e-9);
        CHECK(b.lower >= oracle->lower - 1e-3 - 1e-9);
        CHECK(b.upper >= oracle->upper - 1e-9);
        CHECK(b.upper <= oracle->upper + 1e-3 + 1e-9);
    }
    CHECK(infeasible < 60);
}

TEST_CASE("response vector indexing") {
    for (int length = 0; length <= 5; ++length) {
        for (int j = 1; j <= (1 << length); ++j) {
            const ResponseVector r = ResponseVector::from_index(j, length);
            CHECK(static_cast<int>(r.bits.size()) == length);
            CHECK(r.index() == j);
        }
    }
    CHECK(ResponseVector::from_index(1, 3).bits == std::vector<int>{0, 0, 0});
    CHECK(ResponseVector::from_index(2, 3).bits == std::vector<int>{1, 0, 0});
    CHECK(ResponseVector::from_index(8, 3).bits == std::vector<int>{1, 1, 1});
}

TEST_CASE("introductory example sets") {
    const Example1 ex = build_example1();
    const Graph& g = ex.graph;
    const Polyhedron s0 = build_S0(ex.ambiguity);
    const int a24 = g.find_arc(2, 4);
    const int a25 = g.find_arc(2, 5);
    const int a36 = g.find_arc(3, 6);
    CHECK(is_feasible(s0));
    CHECK(s0.upper[a24] == doctest::Approx(1.0));
    CHECK(s0.upper[g.find_arc(1, 2)] == doctest::Approx(0.0));

    const ArcCoefficients upper_path{{a24, 1.0}};
    CHECK(*optimize_over(s0, upper_path, ObjectiveSense::Maximize) == doctest::Approx(1.0));
    CHECK(*optimize_over(s0, {{a24, 1.0}, {a36, 1.0}}, ObjectiveSense::Maximize) == doctest::Approx(1.0));

    // satisfied: E[c24] <= E[c25], so c24 is at most one half
    const Polyhedron sat = partition(s0, ex.ambiguity, ex.auxiliary, ResponseVector::from_index(2, 1));
    const Polyhedron vio = partition(s0, ex.ambiguity, ex.auxiliary, ResponseVector::from_index(1, 1));
    CHECK(*optimize_over(sat, upper_path, ObjectiveSense::Maximize) == doctest::Approx(0.5));
    CHECK(*optimize_over(vio, {{a25, 1.0}}, ObjectiveSense::Maximize) == doctest::Approx(0.5));
    CHECK(*optimize_over(vio, upper_path, ObjectiveSense::Maximize) == doctest::Approx(1.0));
    CHECK(refines(s0, sat));
    CHECK(refines(s0, vio));
    CHECK_FALSE(refines(s0, s0));

    const auto arg = argmax_over(sat, {{a25, 1.0}});
    REQUIRE(arg);
    CHECK(arg->first == doctest::Approx(1.0));
    CHECK(arg->second[a25] == doctest::Approx(1.0));
}

TEST_CASE("probability constraints tighten the box") {
    AmbiguitySet amb = AmbiguitySet::with_support(2, 0.0, 1.0);
    const Graph g(3, 1, 3, {{1, 2}, {2, 3}});
    const Polyhedron s0 = build_S0(amb);
    AuxiliaryConstraint c;
    c.node = 1;
    c.kind = AuxKind::Probability;
    c.family = AuxFamily::Probability;
    c.arc = 0;
    c.l = 0.5;
    c.u = 1.0;
    c.q_tilde = 0.3;
    c.validate(g);
    const AuxiliaryList list{c};
    const Polyhedron sat = partition(s0, amb, list, ResponseVector::from_index(2, 1));
    const Polyhedron vio = partition(s0, amb, list, ResponseVector::from_index(1, 1));
    CHECK(sat.upper[0] == doctest::Approx(0.65));
    CHECK(sat.lower[0] == doctest::Approx(0.0));
    CHECK(vio.lower[0] == doctest::Approx(0.15));
    CHECK(vio.upper[0] == doctest::Approx(1.0));
    CHECK(sat.upper[1] == doctest::Approx(1.0));

    // the constraint must read an arc leaving its node
    c.node = 2;
    CHECK_THROWS_AS(c.validate(g), InvalidArgument);
}

TEST_CASE("empty sets") {
    Polyhedron p;
    p.lower = {0.0, 0.6};
    p.upper = {1.0, 0.5};
    CHECK(p.box_empty());
    CHECK_FALSE(is_feasible(p));
    CHECK_FALSE(optimize_over(p, {{0, 1.0}}, ObjectiveSense::Maximize).has_value());

    Polyhedron q;
    q.lower = {0.0, 0.0};
    q.upper = {1.0, 1.0};
    q.rows.push_back({{{0, 1.0}, {1, 1.0}}, -0.5});
    CHECK_FALSE(q.box_empty());
    CHECK_FALSE(is_feasible(q));

    const ProbabilityConstraint support{0, 0.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(marginal_expectation_bounds({support, {0, 0.2, 0.4, 0.7, 1.0}, {0, 0.6, 0.8, 0.7, 1.0}}),
                    InfeasibleAmbiguity);

    AmbiguitySet bad = AmbiguitySet::with_support(1, 0.0, 1.0);
    bad.per_arc[0][0].q_lo = 0.5;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
