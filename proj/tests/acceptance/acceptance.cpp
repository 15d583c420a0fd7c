// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers as arguments to run
// a subset.

#include "drspp/ambiguity.hpp"
#include "drspp/datagen.hpp"
#include "drspp/errors.hpp"
#include "drspp/experiments.hpp"
#include "drspp/formulations.hpp"
#include "drspp/solver.hpp"
#include "drspp/verification.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace drspp;

namespace {

// Tolerances and budgets, fixed here rather than taken from the command line.
constexpr double kExampleTol = 1e-6;
constexpr double kExampleSeconds = 1.0;
constexpr double kBoundsTol = 1e-9;
constexpr double kOracleTol = 1e-6;
constexpr int kStaticInstances = 100;
constexpr std::size_t kMaxPaths = 50;
constexpr int kDynamicInstances = 50;
constexpr int kDynamicMaxNodes = 10;
constexpr double kDynamicSeconds = 600.0;
constexpr int kSandwichInstances = 200;
constexpr int kModeInstances = 30;
constexpr double kHoeffdingTarget = 0.17533;
constexpr double kHoeffdingTol = 1e-5;
constexpr double kHalvingTol = 1e-12;
constexpr int kBetaSamples = 100000;
constexpr double kBetaSe = 3.0;
constexpr int kGridReps = 20;
constexpr double kGridSeconds = 900.0;
constexpr double kRhoTol = 1e-9;
constexpr double kDualityTol = 1e-6;
constexpr int kRandomLps = 500;
constexpr int kRandomMips = 200;
constexpr int kMaxBinaries = 12;
constexpr double kMipTol = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

Instance make_instance(std::uint64_t seed, int h, int r, GraphClass cls, int num_aux) {
    InstanceConfig c;
    c.h = h;
    c.r = r;
    c.graph = cls;
    c.num_aux = num_aux;
    c.seed = seed;
    return generate_instance(c);
}

AuxiliaryList prefix(const AuxiliaryList& list, int k) {
    return {list.begin(), list.begin() + k};
}

double dynamic_value(const Instance& inst, const Polyhedron& s0, int k,
                     NonAnticipativityMode mode = NonAnticipativityMode::Auto) {
    const AuxiliaryList list = prefix(inst.auxiliary, k);
    const MultiStagePolicy p = solve_multistage(inst.graph, build_partitions(s0, inst.ambiguity, list), list, mode);
    if (p.outcome.status != MipStatus::Optimal) {
        throw NumericalFailure(std::string("multi-stage model ended ") + to_string(p.outcome.status));
    }
    return p.objective;
}

Outcome introductory_example() {
    const auto start = Clock::now();
    const Example1 ex = build_example1();
    const Polyhedron s0 = build_S0(ex.ambiguity);
    const double zs = solve_static(ex.graph, s0).outcome.objective;
    const double zl = solve_maxmin(ex.graph, s0);
    const double zd =
        solve_multistage(ex.graph, build_partitions(s0, ex.ambiguity, ex.auxiliary), ex.auxiliary).objective;
    const double elapsed = seconds_since(start);
    Outcome o;
    o.pass = std::abs(zs - 1.0) <= kExampleTol && std::abs(zl - 0.25) <= kExampleTol &&
             std::abs(zd - 0.5) <= kExampleTol && elapsed < kExampleSeconds;
    o.detail = fmt("z_static=%.9f z_lower=%.9f z_dynamic=%.9f in %.4fs", zs, zl, zd, elapsed);
    return o;
}

Outcome single_arc_bounds() {
    const ProbabilityConstraint support{0, 0.0, 1.0, 1.0, 1.0};
    double worst = 0.0;
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const ExpectationBounds upper = marginal_expectation_bounds({support, {0, 0.5, 1.0, 0.0, q}});
        const ExpectationBounds lower = marginal_expectation_bounds({support, {0, 0.5, 1.0, q, 1.0}});
        worst = std::max(worst, std::abs(upper.upper - (0.5 * q + 0.5)));
        worst = std::max(worst, std::abs(lower.lower - 0.5 * q));
    }
    return {worst <= kBoundsTol, fmt("max deviation %.3e over 5 levels", worst)};
}

Outcome static_vs_enumeration() {
    const std::vector<std::pair<int, int>> shapes{{2, 2}, {2, 3}, {2, 4}, {2, 5}, {3, 2}, {3, 3}, {4, 2}, {2, 7}, {5, 2}};
    int checked = 0;
    int mismatches = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; checked < kStaticInstances; ++seed) {
        const auto [h, r] = shapes[seed % shapes.size()];
        const Instance inst = make_instance(1000 + seed, h, r, GraphClass::Acyclic, 1);
        if (enumerate_simple_paths(inst.graph, kMaxPaths + 1).size() > kMaxPaths) {
            continue;
        }
        const Polyhedron s0 = build_S0(inst.ambiguity);
        const StaticSolution st = solve_static(inst.graph, s0);
        const double gap = std::abs(st.outcome.objective - oracle::static_value(inst.graph, s0));
        worst = std::max(worst, gap);
        mismatches += st.outcome.status != MipStatus::Optimal || gap > kOracleTol;
        ++checked;
    }
    return {mismatches == 0, fmt("%g instances, %g mismatches, max gap %.3e", checked, mismatches, worst)};
}

Outcome dynamic_vs_policy_oracle() {
    const std::vector<std::pair<int, int>> shapes{{2, 3}, {2, 4}, {3, 2}, {4, 2}};
    const auto start = Clock::now();
    int checked = 0;
    int mismatches = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; checked < kDynamicInstances; ++seed) {
        const auto [h, r] = shapes[seed % shapes.size()];
        const Instance inst = make_instance(2000 + seed, h, r, GraphClass::Acyclic, 2);
        if (inst.graph.num_nodes() > kDynamicMaxNodes) {
            continue;
        }
        const Polyhedron s0 = build_S0(inst.ambiguity);
        for (int k = 1; k <= 2; ++k) {
            const AuxiliaryList list = prefix(inst.auxiliary, k);
            const std::vector<Polyhedron> parts = build_partitions(s0, inst.ambiguity, list);
            const MultiStagePolicy p = solve_multistage(inst.graph, parts, list);
            const double gap = std::abs(p.objective - oracle::dynamic_value(inst.graph, parts, list));
            worst = std::max(worst, gap);
            mismatches += p.outcome.status != MipStatus::Optimal || gap > kOracleTol;
        }
        ++checked;
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < kDynamicSeconds,
            fmt("%g instances x 2 list lengths, %g mismatches, max gap %.3e, %.1fs", checked, mismatches, worst,
                elapsed)};
}

Outcome sandwich_and_nesting() {
    const std::vector<std::pair<int, int>> shapes{{2, 3}, {3, 2}, {2, 2}, {3, 3}};
    int violations = 0;
    double worst = 0.0;
    for (int n = 0; n < kSandwichInstances; ++n) {
        const auto [h, r] = shapes[n % shapes.size()];
        const GraphClass cls = n % 5 == 4 && h * r <= 4 ? GraphClass::General : GraphClass::Acyclic;
        const Instance inst = make_instance(3000 + n, h, r, cls, 2);
        const Polyhedron s0 = build_S0(inst.ambiguity);
        const double zs = solve_static(inst.graph, s0).outcome.objective;
        const double zl = solve_maxmin(inst.graph, s0);
        double previous = zs;
        for (int k = 0; k <= 2; ++k) {
            const double zd = dynamic_value(inst, s0, k);
            const double breach = std::max({zl - zd, zd - zs, zd - previous});
            worst = std::max(worst, breach);
            violations += breach > kOracleTol;
            previous = zd;
        }
    }
    return {violations == 0, fmt("%g instances x 3 nested lengths, %g violations, worst breach %.3e",
                                 kSandwichInstances, violations, worst)};
}

Outcome scheme_agreement() {
    int mismatches = 0;
    double worst = 0.0;
    for (int n = 0; n < kModeInstances; ++n) {
        const int h = n % 2 == 0 ? 2 : 3;
        const int r = n % 2 == 0 ? 3 : 2;
        const Instance inst = make_instance(4000 + n, h, r, GraphClass::Acyclic, 2);
        const Polyhedron s0 = build_S0(inst.ambiguity);
        for (int k = 1; k <= 2; ++k) {
            const double a = dynamic_value(inst, s0, k, NonAnticipativityMode::Acyclic);
            const double g = dynamic_value(inst, s0, k, NonAnticipativityMode::General);
            worst = std::max(worst, std::abs(a - g));
            mismatches += std::abs(a - g) > kOracleTol;
        }
    }
    return {mismatches == 0, fmt("%g instances x 2 list lengths, %g mismatches, max gap %.3e", kModeInstances,
                                 mismatches, worst)};
}

Outcome hoeffding() {
    const double eps = hoeffding_epsilon(60, 0.95, 1.0);
    double worst_ratio = 0.0;
    for (int n : {15, 60, 240, 1000}) {
        worst_ratio = std::max(worst_ratio, std::abs(hoeffding_epsilon(4 * n, 0.95, 1.0) /
                                                         hoeffding_epsilon(n, 0.95, 1.0) - 0.5));
    }
    return {std::abs(eps - kHoeffdingTarget) <= kHoeffdingTol && worst_ratio <= kHalvingTol,
            fmt("eps(60, 0.95, 1)=%.7f, halving error %.3e", eps, worst_ratio)};
}

Outcome beta_moments() {
    const auto [a, b] = beta_params(0.5, 0.125);
    bool pass = a == 7.5 && b == 7.5;
    double worst = 0.0;
    for (double m : {0.5, 0.3, 0.75}) {
        const double sigma = 0.125;
        const auto [al, be] = beta_params(m, sigma);
        NominalModel model;
        model.marginals = {NominalMarginal{0, m, sigma, al, be}};
        model.representative = {0};
        const SampleSet s = model.sample(kBetaSamples, 7);
        double mean = 0.0;
        for (int k = 0; k < s.rows; ++k) {
            mean += s.at(k, 0);
        }
        mean /= s.rows;
        double var = 0.0;
        for (int k = 0; k < s.rows; ++k) {
            var += (s.at(k, 0) - mean) * (s.at(k, 0) - mean);
        }
        var /= s.rows - 1;
        // fourth central moment from the excess kurtosis of the beta law
        const double t = al + be;
        const double v = sigma * sigma;
        const double excess =
            6.0 * ((al - be) * (al - be) * (t + 1.0) - al * be * (t + 2.0)) / (al * be * (t + 2.0) * (t + 3.0));
        const double mu4 = (excess + 3.0) * v * v;
        const double z_mean = std::abs(mean - m) / std::sqrt(v / s.rows);
        const double z_var = std::abs(var - v) / std::sqrt((mu4 - v * v) / s.rows);
        worst = std::max({worst, z_mean, z_var});
    }
    pass = pass && worst <= kBetaSe;
    return {pass, fmt("shapes (%.6g, %.6g), largest standardized moment error %.3f", a, b, worst)};
}

Outcome experiment_grid() {
    Grid grid;
    grid.base.h = 3;
    grid.base.r = 3;
    grid.base.graph = GraphClass::Acyclic;
    grid.base.n_train = 60;
    grid.base.n_verify = 60;
    grid.axes = {{"num_aux", {1, 2, 3}}};
    grid.nested = true;
    const auto start = Clock::now();
    const ExperimentResult res = run_experiment(grid, kGridReps, 1);
    const double elapsed = seconds_since(start);

    bool pass = res.rows.size() == 3;
    double min_rho = 1e300;
    double max_rho = -1e300;
    for (const InstanceRecord& r : res.records) {
        pass = pass && r.error.empty();
        if (!r.timeout && r.error.empty()) {
            min_rho = std::min(min_rho, r.metrics.rho1);
            max_rho = std::max(max_rho, r.metrics.rho1);
        }
    }
    pass = pass && min_rho >= -kRhoTol && max_rho <= 100.0 + kRhoTol;
    std::ostringstream detail;
    detail.precision(4);
    for (std::size_t k = 0; k < res.rows.size(); ++k) {
        const AggregateRow& row = res.rows[k];
        if (k > 0) {
            pass = pass && row.mean_rho1 >= res.rows[k - 1].mean_rho1 - kRhoTol;
            pass = pass && row.mean_time_s > res.rows[k - 1].mean_time_s;
        }
        detail << "L=" << row.config.num_aux << " rho1=" << row.mean_rho1 << " t=" << row.mean_time_s << "s n="
               << row.n_instances << " timeouts=" << row.n_timeouts << "; ";
    }
    pass = pass && elapsed < kGridSeconds;
    detail << "rho1 in [" << min_rho << ", " << max_rho << "], " << elapsed << "s total";
    return {pass, detail.str()};
}

Outcome solver_checks() {
    std::mt19937_64 rng(77);
    int lp_failures = 0;
    double lp_worst = 0.0;
    for (int n = 0; n < kRandomLps; ++n) {
        const LinearProgram lp = testing::random_boxed_lp(rng);
        const LpOutcome out = solve_lp(lp);
        if (out.status != LpStatus::Optimal) {
            ++lp_failures;
            continue;
        }
        const testing::Certificate cert = testing::dual_certificate(lp, out);
        const double gap = std::abs(cert.objective - out.objective);
        lp_worst = std::max(lp_worst, gap);
        lp_failures += !cert.bounded || cert.sign_violation > kDualityTol || gap > kDualityTol;
    }
    int mip_failures = 0;
    int nondeterministic = 0;
    for (int n = 0; n < kRandomMips; ++n) {
        const MixedIntegerProgram mip = testing::random_mip(rng, kMaxBinaries);
        bool feasible = false;
        const double expected = testing::enumerate_mip(mip, feasible);
        const MipOutcome a = solve_mip(mip);
        const MipOutcome b = solve_mip(mip);
        nondeterministic += a.nodes != b.nodes || a.lp_iterations != b.lp_iterations;
        if (!feasible) {
            mip_failures += a.status != MipStatus::Infeasible;
        } else {
            mip_failures += a.status != MipStatus::Optimal || std::abs(a.objective - expected) > kMipTol;
        }
    }
    return {lp_failures == 0 && mip_failures == 0 && nondeterministic == 0,
            fmt("LP failures %g (max gap %.3e), MIP mismatches %g, node-count differences %g", lp_failures, lp_worst,
                mip_failures, nondeterministic)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "introductory example", introductory_example},
        {2, "single-arc expectation bounds", single_arc_bounds},
        {3, "static model vs path enumeration", static_vs_enumeration},
        {4, "multi-stage model vs policy oracle", dynamic_vs_policy_oracle},
        {5, "sandwich and nested lists", sandwich_and_nesting},
        {6, "acyclic and ordering schemes agree", scheme_agreement},
        {7, "Hoeffding radius", hoeffding},
        {8, "beta parameters and moments", beta_moments},
        {9, "experiment grid", experiment_grid},
        {10, "LP and MIP solver", solver_checks},
    };
    std::set<int> selected;
    for (int k = 1; k < argc; ++k) {
        selected.insert(std::atoi(argv[k]));
    }
    int failed = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && selected.count(c.id) == 0) {
            continue;
        }
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
