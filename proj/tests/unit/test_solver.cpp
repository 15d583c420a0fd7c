#include <doctest.h>

#include "drspp/errors.hpp"
#include "drspp/solver.hpp"
#include "random_models.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace drspp;
using namespace drspp::testing;

TEST_CASE("bounded variable maximized at its upper bound") {
    LinearProgram lp;
    lp.sense = ObjectiveSense::Maximize;
    lp.add_variable("x", 0.0, 1.0, 1.0);
    const LpOutcome out = solve_lp(lp);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.objective == doctest::Approx(1.0));
}

TEST_CASE("contradictory row is infeasible") {
    LinearProgram lp;
    const int x = lp.add_variable("x", 0.0, kInf, 1.0);
    lp.add_row({{x, 1.0}}, RowSense::LessEqual, -1.0);
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded ray is reported") {
    LinearProgram lp;
    lp.sense = ObjectiveSense::Maximize;
    const int x = lp.add_variable("x", 0.0, kInf, 1.0);
    const int y = lp.add_variable("y", 0.0, kInf, 0.0);
    lp.add_row({{x, 1.0}, {y, -1.0}}, RowSense::LessEqual, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("empty rows are checked against their right-hand side") {
    LinearProgram lp;
    lp.add_variable("x", 0.0, 1.0, 1.0);
    lp.add_row({}, RowSense::LessEqual, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::Optimal);
    lp.add_row({}, RowSense::GreaterEqual, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("free variables and equalities") {
    LinearProgram lp;
    const int x = lp.add_variable("x", -kInf, kInf, 1.0);
    const int y = lp.add_variable("y", -kInf, kInf, 2.0);
    lp.add_row({{x, 1.0}, {y, 1.0}}, RowSense::Equal, 3.0);
    lp.add_row({{x, 1.0}, {y, -1.0}}, RowSense::LessEqual, 1.0);
    const LpOutcome out = solve_lp(lp);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.values[x] == doctest::Approx(2.0));
    CHECK(out.values[y] == doctest::Approx(1.0));
    CHECK(out.objective == doctest::Approx(4.0));
}

TEST_CASE("random LPs close the duality gap") {
    std::mt19937_64 rng(20240611);
    int optimal = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const LinearProgram lp = random_boxed_lp(rng);
        const LpOutcome out = solve_lp(lp);
        REQUIRE(out.status == LpStatus::Optimal);
        ++optimal;
        CHECK(lp.max_violation(out.values) <= 1e-7);
        const Certificate cert = dual_certificate(lp, out);
        CHECK(cert.bounded);
        CHECK(cert.sign_violation <= 1e-9);
        CHECK(cert.reduced_cost_error <= 1e-9);
        CHECK(std::abs(cert.objective - out.objective) <= 1e-6);
    }
    CHECK(optimal == 500);
}

TEST_CASE("explicit dual LP agrees with the primal") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 7;
        const int m = 1 + trial % 5;
        std::vector<std::vector<double>> a(m, std::vector<double>(n));
        std::vector<double> b(m);
        std::vector<double> c(n);
        for (auto& row : a) {
            for (double& v : row) {
                v = std::round(unit(rng) * 8.0) / 2.0 + 0.5;
            }
        }
        for (double& v : b) {
            v = 1.0 + 5.0 * unit(rng);
        }
        for (double& v : c) {
            v = 4.0 * unit(rng) - 1.0;
        }
        LinearProgram primal;
        primal.sense = ObjectiveSense::Maximize;
        for (int j = 0; j < n; ++j) {
            primal.add_variable("x" + std::to_string(j), 0.0, kInf, c[j]);
        }
        for (int i = 0; i < m; ++i) {
            std::vector<Term> t;
            for (int j = 0; j < n; ++j) {
                t.push_back({j, a[i][j]});
            }
            primal.add_row(t, RowSense::LessEqual, b[i]);
        }
        LinearProgram dual;
        for (int i = 0; i < m; ++i) {
            dual.add_variable("y" + std::to_string(i), 0.0, kInf, b[i]);
        }
        for (int j = 0; j < n; ++j) {
            std::vector<Term> t;
            for (int i = 0; i < m; ++i) {
                t.push_back({i, a[i][j]});
            }
            dual.add_row(t, RowSense::GreaterEqual, c[j]);
        }
        const LpOutcome p = solve_lp(primal);
        const LpOutcome d = solve_lp(dual);
        REQUIRE(p.status == LpStatus::Optimal);
        REQUIRE(d.status == LpStatus::Optimal);
        CHECK(std::abs(p.objective - d.objective) <= 1e-6);
        for (int i = 0; i < m; ++i) {
            CHECK(p.duals[i] >= -1e-9);
        }
    }
}

TEST_CASE("degenerate LP terminates") {
    // Classic cycling example for textbook Dantzig pivoting.
    LinearProgram lp;
    lp.sense = ObjectiveSense::Maximize;
    const int x1 = lp.add_variable("x1", 0.0, kInf, 10.0);
    const int x2 = lp.add_variable("x2", 0.0, kInf, -57.0);
    const int x3 = lp.add_variable("x3", 0.0, kInf, -9.0);
    const int x4 = lp.add_variable("x4", 0.0, kInf, -24.0);
    lp.add_row({{x1, 0.5}, {x2, -5.5}, {x3, -2.5}, {x4, 9.0}}, RowSense::LessEqual, 0.0);
    lp.add_row({{x1, 0.5}, {x2, -1.5}, {x3, -0.5}, {x4, 1.0}}, RowSense::LessEqual, 0.0);
    lp.add_row({{x1, 1.0}}, RowSense::LessEqual, 1.0);
    const LpOutcome out = solve_lp(lp);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.objective == doctest::Approx(1.0));
}

TEST_CASE("iteration budget raises NumericalFailure") {
    LinearProgram lp;
    lp.sense = ObjectiveSense::Maximize;
    const int x = lp.add_variable("x", 0.0, kInf, 1.0);
    const int y = lp.add_variable("y", 0.0, kInf, 1.0);
    lp.add_row({{x, 1.0}, {y, 2.0}}, RowSense::LessEqual, 4.0);
    lp.add_row({{x, 3.0}, {y, 1.0}}, RowSense::LessEqual, 6.0);
    SolverOptions opt;
    opt.max_iterations = 1;
    CHECK_THROWS_AS(solve_lp(lp, opt), NumericalFailure);
}

TEST_CASE("knapsack matches exhaustive enumeration") {
    const double value[8] = {10, 13, 7, 8, 12, 4, 9, 6};
    const double weight[8] = {5, 7, 4, 3, 6, 2, 5, 3};
    MixedIntegerProgram mip;
    mip.lp.sense = ObjectiveSense::Maximize;
    std::vector<Term> row;
    for (int j = 0; j < 8; ++j) {
        row.push_back({mip.add_binary("b" + std::to_string(j), value[j]), weight[j]});
    }
    mip.lp.add_row(row, RowSense::LessEqual, 17.0);
    double best = 0.0;
    for (unsigned mask = 0; mask < 256; ++mask) {
        double v = 0.0;
        double w = 0.0;
        for (int j = 0; j < 8; ++j) {
            if ((mask >> j) & 1u) {
                v += value[j];
                w += weight[j];
            }
        }
        if (w <= 17.0) {
            best = std::max(best, v);
        }
    }
    const MipOutcome out = solve_mip(mip);
    REQUIRE(out.status == MipStatus::Optimal);
    CHECK(out.objective == doctest::Approx(best));
    CHECK(std::abs(out.objective - out.bound) <= 1e-6);
}

TEST_CASE("random MIPs match enumeration") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const MixedIntegerProgram mip = random_mip(rng, 12);
        bool feasible = false;
        const double expected = enumerate_mip(mip, feasible);
        const MipOutcome out = solve_mip(mip);
        if (!feasible) {
            CHECK(out.status == MipStatus::Infeasible);
            continue;
        }
        REQUIRE(out.status == MipStatus::Optimal);
        CHECK(std::abs(out.objective - expected) <= 1e-6);
        CHECK(mip.lp.max_violation(out.values) <= 1e-6);
        for (int j = 0; j < mip.lp.num_variables(); ++j) {
            if (mip.is_integer(j)) {
                CHECK(std::abs(out.values[j] - std::round(out.values[j])) <= 1e-6);
            }
        }
    }
}

TEST_CASE("branch and bound is deterministic") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const MixedIntegerProgram mip = random_mip(rng, 12);
        std::ostringstream first_trace;
        std::ostringstream second_trace;
        const MipOutcome a = solve_mip(mip, {}, {}, trace_to(first_trace));
        const MipOutcome b = solve_mip(mip, {}, {}, trace_to(second_trace));
        CHECK(a.nodes == b.nodes);
        CHECK(a.lp_iterations == b.lp_iterations);
        CHECK(a.values == b.values);
        CHECK(first_trace.str() == second_trace.str());
    }
}

TEST_CASE("node limit keeps the incumbent") {
    std::mt19937_64 rng(9);
    MixedIntegerProgram mip;
    mip.lp.sense = ObjectiveSense::Maximize;
    std::vector<Term> row;
    std::uniform_real_distribution<double> unit(1.0, 10.0);
    for (int j = 0; j < 30; ++j) {
        row.push_back({mip.add_binary("b" + std::to_string(j), unit(rng)), unit(rng)});
    }
    mip.lp.add_row(row, RowSense::LessEqual, 40.0);
    MipLimits limits;
    limits.nodes = 5;
    const MipOutcome out = solve_mip(mip, limits);
    CHECK(out.status == MipStatus::NodeLimit);
    CHECK(out.nodes == 5);
    if (out.has_incumbent) {
        CHECK(out.bound >= out.objective - 1e-9);
    }
}
