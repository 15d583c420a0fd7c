#include "drspp/formulations.hpp"

#include "drspp/errors.hpp"
#include "drspp/nonanticipativity.hpp"

#include <cmath>
#include <string>

namespace drspp {

namespace {

std::string arc_name(const Graph& g, int a) {
    return std::to_string(g.arc(a).tail) + "_" + std::to_string(g.arc(a).head);
}

/// Adds lambda >= 0 for every row of B and the rows -y + B^T lambda = 0. Returns lambda indices.
std::vector<int> add_duality_block(MixedIntegerProgram& mip, const Graph& g, const std::vector<PolyRow>& rows,
                                   const std::vector<int>& y, const std::string& tag, double objective_scale) {
    std::vector<int> lambda(rows.size());
    std::vector<std::vector<Term>> per_arc(g.num_arcs());
    for (int a = 0; a < g.num_arcs(); ++a) {
        per_arc[a].push_back({y[a], -1.0});
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        lambda[k] = mip.add_continuous("lam_" + tag + std::to_string(k), 0.0, kInf, objective_scale * rows[k].rhs);
        for (const auto& [a, v] : rows[k].coeffs) {
            if (v != 0.0) {
                per_arc.at(a).push_back({lambda[k], v});
            }
        }
    }
    for (int a = 0; a < g.num_arcs(); ++a) {
        mip.lp.add_row(std::move(per_arc[a]), RowSense::Equal, 0.0, "dual_" + tag + arc_name(g, a));
    }
    return lambda;
}

std::vector<int> add_path_variables(MixedIntegerProgram& mip, const Graph& g, const std::string& tag) {
    std::vector<int> y(g.num_arcs());
    for (int a = 0; a < g.num_arcs(); ++a) {
        y[a] = mip.add_binary("y_" + tag + arc_name(g, a));
    }
    add_path_rows(mip, g, y, tag);
    return y;
}

PathIncidence read_path(const Graph& g, const std::vector<double>& values, const std::vector<int>& y) {
    PathIncidence p(g.num_arcs(), 0);
    for (int a = 0; a < g.num_arcs(); ++a) {
        p[a] = values[y[a]] > 0.5 ? 1 : 0;
    }
    return trim_to_path(g, p);
}

} // namespace

void add_path_rows(MixedIntegerProgram& mip, const Graph& g, const std::vector<int>& y, const std::string& tag) {
    for (int i = 1; i <= g.num_nodes(); ++i) {
        std::vector<Term> flow;
        std::vector<Term> once;
        for (int a : g.forward_star(i)) {
            flow.push_back({y[a], 1.0});
            once.push_back({y[a], 1.0});
        }
        for (int a : g.reverse_star(i)) {
            flow.push_back({y[a], -1.0});
        }
        const double balance = i == g.source() ? 1.0 : (i == g.sink() ? -1.0 : 0.0);
        mip.lp.add_row(std::move(flow), RowSense::Equal, balance, "flow_" + tag + std::to_string(i));
        if (!once.empty()) {
            mip.lp.add_row(std::move(once), RowSense::LessEqual, 1.0, "once_" + tag + std::to_string(i));
        }
    }
}

std::vector<PolyRow> dual_rows(const Polyhedron& p) {
    std::vector<PolyRow> rows = p.rows;
    for (int a = 0; a < p.num_arcs(); ++a) {
        rows.push_back({{{a, 1.0}}, p.upper[a]});
        rows.push_back({{{a, -1.0}}, -p.lower[a]});
    }
    return rows;
}

StaticModel build_static_mip(const Graph& g, const Polyhedron& s0) {
    if (s0.num_arcs() != g.num_arcs()) {
        throw InvalidArgument("polyhedron dimension differs from the arc count");
    }
    StaticModel m;
    m.y = add_path_variables(m.mip, g, "");
    m.lambda = add_duality_block(m.mip, g, dual_rows(s0), m.y, "", 1.0);
    m.mip.lp.sense = ObjectiveSense::Minimize;
    return m;
}

MaxMinModel build_maxmin_lp(const Graph& g, const Polyhedron& s0) {
    if (s0.num_arcs() != g.num_arcs()) {
        throw InvalidArgument("polyhedron dimension differs from the arc count");
    }
    if (s0.box_empty()) {
        throw InvalidArgument("max-min model needs a nonempty uncertainty set");
    }
    MaxMinModel m;
    m.lp.sense = ObjectiveSense::Maximize;
    m.cost.resize(g.num_arcs());
    for (int a = 0; a < g.num_arcs(); ++a) {
        m.cost[a] = m.lp.add_variable("c_" + arc_name(g, a), s0.lower[a], std::max(s0.lower[a], s0.upper[a]));
    }
    m.mu.assign(g.num_nodes() + 1, -1);
    for (int i = 1; i <= g.num_nodes(); ++i) {
        const double obj = i == g.source() ? 1.0 : (i == g.sink() ? -1.0 : 0.0);
        m.mu[i] = m.lp.add_variable("mu_" + std::to_string(i), -kInf, kInf, obj);
    }
    // mu is a distance-to-sink potential: mu_tail - mu_head <= c_a.
    for (int a = 0; a < g.num_arcs(); ++a) {
        const Arc& e = g.arc(a);
        m.lp.add_row({{m.cost[a], 1.0}, {m.mu[e.tail], -1.0}, {m.mu[e.head], 1.0}}, RowSense::GreaterEqual, 0.0,
                     "pot_" + arc_name(g, a));
    }
    for (std::size_t k = 0; k < s0.rows.size(); ++k) {
        std::vector<Term> terms;
        for (const auto& [a, v] : s0.rows[k].coeffs) {
            terms.push_back({m.cost[a], v});
        }
        m.lp.add_row(std::move(terms), RowSense::LessEqual, s0.rows[k].rhs, "set_" + std::to_string(k));
    }
    return m;
}

MultiStageModel build_multistage_mip(const Graph& g, const std::vector<Polyhedron>& partitions,
                                     const AuxiliaryList& list, NonAnticipativityMode mode, int scenario_cap) {
    if (static_cast<int>(list.size()) > scenario_cap) {
        throw TooManyScenarios("auxiliary list of length " + std::to_string(list.size()) + " exceeds the cap of " +
                               std::to_string(scenario_cap));
    }
    const int scenarios = 1 << list.size();
    if (static_cast<int>(partitions.size()) != scenarios) {
        throw InvalidArgument("expected one partition per response vector");
    }
    for (const AuxiliaryConstraint& c : list) {
        c.validate(g);
    }
    const bool acyclic = g.is_acyclic();
    if (mode == NonAnticipativityMode::Auto) {
        mode = acyclic ? NonAnticipativityMode::Acyclic : NonAnticipativityMode::General;
    }
    if (mode == NonAnticipativityMode::Acyclic && !acyclic) {
        throw NotAcyclic("acyclic mode requested on a graph with a directed cycle");
    }

    MultiStageModel m;
    m.mode = mode;
    m.mip.lp.sense = ObjectiveSense::Minimize;
    m.z = m.mip.add_continuous("z", -kInf, kInf, 1.0);
    GeneralRowBuilder general(m.mip, g);
    for (int j = 1; j <= scenarios; ++j) {
        const std::string tag = std::to_string(j) + "_";
        const Polyhedron& sj = partitions[j - 1];
        if (sj.num_arcs() != g.num_arcs()) {
            throw InvalidArgument("partition dimension differs from the arc count");
        }
        if (!is_feasible(sj)) {
            m.empty_scenarios.push_back(j);
        }
        m.y.push_back(add_path_variables(m.mip, g, tag));
        const std::vector<PolyRow> rows = dual_rows(sj);
        m.lambda.push_back(add_duality_block(m.mip, g, rows, m.y.back(), tag, 0.0));
        std::vector<Term> epigraph{{m.z, 1.0}};
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (rows[k].rhs != 0.0) {
                epigraph.push_back({m.lambda.back()[k], -rows[k].rhs});
            }
        }
        m.mip.lp.add_row(std::move(epigraph), RowSense::GreaterEqual, 0.0, "epi_" + std::to_string(j));
        if (mode == NonAnticipativityMode::General) {
            m.t.push_back(general.add_labels(j, m.y.back()));
        }
    }

    const Reachability reach = mode == NonAnticipativityMode::Acyclic ? reachability(g) : Reachability{};
    const int length = static_cast<int>(list.size());
    for (int j = 1; j <= scenarios; ++j) {
        for (int l = j + 1; l <= scenarios; ++l) {
            const DiffNodes nd = diff_nodes(list, ResponseVector::from_index(j, length),
                                            ResponseVector::from_index(l, length));
            if (mode == NonAnticipativityMode::Acyclic) {
                for (LinearRow& row : acyclic_rows(g, reach, nd, m.y[j - 1], m.y[l - 1])) {
                    m.mip.lp.add_row(std::move(row.terms), row.sense, row.rhs, std::move(row.name));
                }
            } else {
                general.add_pair(nd, m.y[j - 1], m.y[l - 1]);
            }
        }
    }
    return m;
}

LinearProgram build_posterior_lp(const Graph& g, const PathIncidence& y, const Polyhedron& s) {
    if (s.num_arcs() != g.num_arcs() || static_cast<int>(y.size()) != g.num_arcs()) {
        throw InvalidArgument("posterior model dimensions differ from the arc count");
    }
    if (!is_feasible(s)) {
        throw PosteriorInfeasible("identified uncertainty set is empty");
    }
    LinearProgram lp;
    lp.sense = ObjectiveSense::Maximize;
    for (int a = 0; a < g.num_arcs(); ++a) {
        lp.add_variable("c_" + arc_name(g, a), s.lower[a], s.upper[a], y[a]);
    }
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
        std::vector<Term> terms;
        for (const auto& [a, v] : s.rows[k].coeffs) {
            terms.push_back({a, v});
        }
        lp.add_row(std::move(terms), RowSense::LessEqual, s.rows[k].rhs, "set_" + std::to_string(k));
    }
    return lp;
}

std::vector<Polyhedron> build_partitions(const Polyhedron& s0, const AmbiguitySet& amb, const AuxiliaryList& list,
                                         int scenario_cap) {
    if (static_cast<int>(list.size()) > scenario_cap) {
        throw TooManyScenarios("auxiliary list of length " + std::to_string(list.size()) + " exceeds the cap of " +
                               std::to_string(scenario_cap));
    }
    const int length = static_cast<int>(list.size());
    std::vector<Polyhedron> parts;
    for (int j = 1; j <= (1 << length); ++j) {
        parts.push_back(partition(s0, amb, list, ResponseVector::from_index(j, length)));
    }
    return parts;
}

StaticSolution solve_static(const Graph& g, const Polyhedron& s0, const MipLimits& limits,
                            const SolverOptions& options) {
    const StaticModel m = build_static_mip(g, s0);
    StaticSolution sol;
    sol.outcome = solve_mip(m.mip, limits, options);
    if (sol.outcome.has_incumbent) {
        sol.y = read_path(g, sol.outcome.values, m.y);
    }
    return sol;
}

double solve_maxmin(const Graph& g, const Polyhedron& s0, const SolverOptions& options) {
    const MaxMinModel m = build_maxmin_lp(g, s0);
    const LpOutcome out = solve_lp(m.lp, options);
    if (out.status != LpStatus::Optimal) {
        throw InvalidArgument(std::string("max-min model is ") + to_string(out.status));
    }
    return out.objective;
}

MultiStagePolicy solve_multistage(const Graph& g, const std::vector<Polyhedron>& partitions,
                                  const AuxiliaryList& list, NonAnticipativityMode mode, const MipLimits& limits,
                                  const SolverOptions& options, int scenario_cap) {
    const MultiStageModel m = build_multistage_mip(g, partitions, list, mode, scenario_cap);
    MultiStagePolicy policy;
    policy.mode = m.mode;
    policy.outcome = solve_mip(m.mip, limits, options);
    if (!policy.outcome.has_incumbent) {
        return policy;
    }
    const std::vector<double>& x = policy.outcome.values;
    policy.objective = policy.outcome.objective;
    for (std::size_t j = 0; j < m.y.size(); ++j) {
        policy.y.push_back(read_path(g, x, m.y[j]));
        std::vector<double> lam;
        for (int k : m.lambda[j]) {
            lam.push_back(x[k]);
        }
        policy.lambda.push_back(std::move(lam));
        std::vector<double> labels;
        if (j < m.t.size()) {
            for (std::size_t i = 1; i < m.t[j].size(); ++i) {
                labels.push_back(x[m.t[j][i]]);
            }
        }
        policy.t.push_back(std::move(labels));
    }
    return policy;
}

double solve_posterior(const Graph& g, const PathIncidence& y, const Polyhedron& s, const SolverOptions& options) {
    const LinearProgram lp = build_posterior_lp(g, y, s);
    const LpOutcome out = solve_lp(lp, options);
    if (out.status != LpStatus::Optimal) {
        throw PosteriorInfeasible("identified uncertainty set is empty");
    }
    return out.objective;
}

const char* to_string(NonAnticipativityMode mode) {
    switch (mode) {
    case NonAnticipativityMode::Auto:
        return "auto";
    case NonAnticipativityMode::Acyclic:
        return "acyclic";
    case NonAnticipativityMode::General:
        return "general";
    }
    return "unknown";
}

} // namespace drspp
