#include "drspp/ambiguity.hpp"

#include "drspp/errors.hpp"
#include "drspp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace drspp {

namespace {

constexpr double kTol = 1e-9;

} // namespace

AmbiguitySet AmbiguitySet::with_support(int num_arcs, double l, double u) {
    AmbiguitySet amb;
    amb.per_arc.resize(num_arcs);
    for (int a = 0; a < num_arcs; ++a) {
        amb.per_arc[a].push_back(ProbabilityConstraint{a, l, u, 1.0, 1.0});
    }
    return amb;
}

void AmbiguitySet::validate() const {
    for (int a = 0; a < num_arcs(); ++a) {
        const auto& list = per_arc[a];
        if (list.empty()) {
            throw InvalidArgument("arc " + std::to_string(a) + " has no support constraint");
        }
        const ProbabilityConstraint& support = list.front();
        if (support.q_lo != 1.0 || support.q_hi != 1.0 || support.l > support.u) {
            throw InvalidArgument("arc " + std::to_string(a) + " has a malformed support constraint");
        }
        for (const ProbabilityConstraint& c : list) {
            if (c.arc != a || c.l > c.u || c.l < support.l || c.u > support.u || c.q_lo < 0.0 ||
                c.q_lo > c.q_hi || c.q_hi > 1.0) {
                throw InvalidArgument("arc " + std::to_string(a) + " has a malformed probability constraint");
            }
        }
    }
    for (const ExpectationRow& row : rows) {
        bool nonzero = false;
        for (const auto& [a, v] : row.coeffs) {
            if (a < 0 || a >= num_arcs()) {
                throw InvalidArgument("expectation row references unknown arc");
            }
            nonzero = nonzero || v != 0.0;
        }
        if (!nonzero) {
            throw InvalidArgument("expectation row has no nonzero coefficient");
        }
    }
}

std::vector<int> AuxiliaryConstraint::arcs() const {
    if (kind == AuxKind::Probability) {
        return {arc};
    }
    std::vector<int> out;
    for (const auto& [a, v] : coeffs) {
        out.push_back(a);
    }
    return out;
}

void AuxiliaryConstraint::validate(const Graph& g) const {
    if (node < 1 || node > g.num_nodes() || node == g.sink()) {
        throw InvalidArgument("auxiliary constraint attached to an invalid node");
    }
    const auto& fs = g.forward_star(node);
    auto in_fs = [&](int a) { return std::find(fs.begin(), fs.end(), a) != fs.end(); };
    if (kind == AuxKind::Probability) {
        if (!in_fs(arc) || l > u || q_tilde < 0.0 || q_tilde > 1.0) {
            throw InvalidArgument("probability constraint must use one arc of its node's forward star");
        }
        return;
    }
    if (coeffs.empty()) {
        throw InvalidArgument("expectation constraint without coefficients");
    }
    for (const auto& [a, v] : coeffs) {
        if (!in_fs(a)) {
            throw InvalidArgument("expectation constraint leaves its node's forward star");
        }
    }
}

int ResponseVector::index() const {
    int j = 0;
    for (std::size_t m = 0; m < bits.size(); ++m) {
        j |= (bits[m] != 0 ? 1 : 0) << m;
    }
    return j + 1;
}

ResponseVector ResponseVector::from_index(int j, int length) {
    if (length < 0 || length > 30 || j < 1 || j > (1 << length)) {
        throw InvalidArgument("response index out of range");
    }
    ResponseVector r;
    r.bits.resize(length);
    for (int m = 0; m < length; ++m) {
        r.bits[m] = ((j - 1) >> m) & 1;
    }
    return r;
}

bool Polyhedron::box_empty() const {
    for (int a = 0; a < num_arcs(); ++a) {
        if (lower[a] > upper[a] + kTol) {
            return true;
        }
    }
    return false;
}

ExpectationBounds marginal_expectation_bounds(const std::vector<ProbabilityConstraint>& constraints) {
    if (constraints.empty()) {
        throw InvalidArgument("marginal bounds need a support constraint");
    }
    std::vector<double> points;
    for (const ProbabilityConstraint& c : constraints) {
        points.push_back(c.l);
        points.push_back(c.u);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    // Atoms sit on breakpoints; each open gap between breakpoints contributes two limit atoms
    // valued at its endpoints but counted with the gap's interval memberships. Their optimum is
    // the supremum (infimum) over all distributions.
    struct Atom {
        double value;
        double lo;
        double hi;
        bool open;
    };
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < points.size(); ++k) {
        atoms.push_back({points[k], points[k], points[k], false});
        if (k + 1 < points.size()) {
            atoms.push_back({points[k], points[k], points[k + 1], true});
            atoms.push_back({points[k + 1], points[k], points[k + 1], true});
        }
    }
    auto inside = [](const Atom& atom, const ProbabilityConstraint& c) {
        return c.l <= atom.lo && atom.hi <= c.u;
    };

    LinearProgram lp;
    std::vector<Term> total;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        lp.add_variable("m" + std::to_string(k), 0.0, kInf, atoms[k].value);
        total.push_back({static_cast<int>(k), 1.0});
    }
    lp.add_row(total, RowSense::Equal, 1.0);
    for (const ProbabilityConstraint& c : constraints) {
        std::vector<Term> terms;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            if (inside(atoms[k], c)) {
                terms.push_back({static_cast<int>(k), 1.0});
            }
        }
        if (c.q_lo == c.q_hi) {
            lp.add_row(terms, RowSense::Equal, c.q_lo);
        } else {
            if (c.q_lo > 0.0) {
                lp.add_row(terms, RowSense::GreaterEqual, c.q_lo);
            }
            if (c.q_hi < 1.0) {
                lp.add_row(terms, RowSense::LessEqual, c.q_hi);
            }
        }
    }
    lp.sense = ObjectiveSense::Minimize;
    const LpOutcome low = solve_lp(lp);
    if (low.status != LpStatus::Optimal) {
        throw InfeasibleAmbiguity("probability constraints admit no distribution");
    }
    lp.sense = ObjectiveSense::Maximize;
    const LpOutcome high = solve_lp(lp);
    if (high.status != LpStatus::Optimal) {
        throw InfeasibleAmbiguity("probability constraints admit no distribution");
    }
    return {low.objective, high.objective};
}

Polyhedron build_S0(const AmbiguitySet& amb) {
    amb.validate();
    Polyhedron p;
    p.lower.resize(amb.num_arcs());
    p.upper.resize(amb.num_arcs());
    for (int a = 0; a < amb.num_arcs(); ++a) {
        const ExpectationBounds b = marginal_expectation_bounds(amb.per_arc[a]);
        p.lower[a] = b.lower;
        p.upper[a] = b.upper;
    }
    for (const ExpectationRow& row : amb.rows) {
        p.rows.push_back({row.coeffs, row.rhs});
        if (row.sense == ExpectationSense::Equal) {
            ArcCoefficients negated = row.coeffs;
            for (auto& term : negated) {
                term.second = -term.second;
            }
            p.rows.push_back({std::move(negated), -row.rhs});
        }
    }
    return p;
}

Polyhedron partition(const Polyhedron& s0, const AmbiguitySet& amb, const AuxiliaryList& list,
                     const ResponseVector& r) {
    if (r.bits.size() != list.size()) {
        throw InvalidArgument("response vector length differs from the auxiliary list");
    }
    Polyhedron p = s0;
    std::vector<std::vector<ProbabilityConstraint>> extra(s0.num_arcs());
    for (std::size_t m = 0; m < list.size(); ++m) {
        const AuxiliaryConstraint& c = list[m];
        const bool satisfied = r.bits[m] != 0;
        if (c.kind == AuxKind::Expectation) {
            PolyRow row{c.coeffs, c.rhs};
            if (!satisfied) {
                for (auto& term : row.coeffs) {
                    term.second = -term.second;
                }
                row.rhs = -row.rhs;
            }
            p.rows.push_back(std::move(row));
        } else {
            extra.at(c.arc).push_back(satisfied ? ProbabilityConstraint{c.arc, c.l, c.u, 0.0, c.q_tilde}
                                                : ProbabilityConstraint{c.arc, c.l, c.u, c.q_tilde, 1.0});
        }
    }
    for (int a = 0; a < s0.num_arcs(); ++a) {
        if (extra[a].empty()) {
            continue;
        }
        std::vector<ProbabilityConstraint> all = amb.per_arc.at(a);
        all.insert(all.end(), extra[a].begin(), extra[a].end());
        try {
            const ExpectationBounds b = marginal_expectation_bounds(all);
            p.lower[a] = std::max(p.lower[a], b.lower);
            p.upper[a] = std::min(p.upper[a], b.upper);
        } catch (const InfeasibleAmbiguity&) {
            p.lower[a] = 1.0;
            p.upper[a] = 0.0;
        }
    }
    return p;
}

namespace {

std::optional<LpOutcome> solve_over(const Polyhedron& p, const ArcCoefficients& coeffs, ObjectiveSense sense) {
    if (p.box_empty()) {
        return std::nullopt;
    }
    LinearProgram lp;
    lp.sense = sense;
    for (int a = 0; a < p.num_arcs(); ++a) {
        lp.add_variable("c" + std::to_string(a), p.lower[a], std::max(p.lower[a], p.upper[a]));
    }
    for (const auto& [a, v] : coeffs) {
        lp.set_objective(a, lp.variable(a).objective + v);
    }
    for (const PolyRow& row : p.rows) {
        std::vector<Term> terms;
        for (const auto& [a, v] : row.coeffs) {
            terms.push_back({a, v});
        }
        lp.add_row(std::move(terms), RowSense::LessEqual, row.rhs);
    }
    LpOutcome out = solve_lp(lp);
    if (out.status == LpStatus::Infeasible) {
        return std::nullopt;
    }
    if (out.status != LpStatus::Optimal) {
        throw NumericalFailure("bounded polyhedron reported an unbounded objective");
    }
    return out;
}

} // namespace

bool is_feasible(const Polyhedron& p) {
    return solve_over(p, {}, ObjectiveSense::Minimize).has_value();
}

std::optional<double> optimize_over(const Polyhedron& p, const ArcCoefficients& coeffs, ObjectiveSense sense) {
    const auto out = solve_over(p, coeffs, sense);
    if (!out) {
        return std::nullopt;
    }
    return out->objective;
}

std::optional<std::pair<double, std::vector<double>>> argmax_over(const Polyhedron& p,
                                                                  const ArcCoefficients& coeffs) {
    auto out = solve_over(p, coeffs, ObjectiveSense::Maximize);
    if (!out) {
        return std::nullopt;
    }
    return std::make_pair(out->objective, std::move(out->values));
}

bool refines(const Polyhedron& s0, const Polyhedron& sj) {
    if (!is_feasible(s0)) {
        return false;
    }
    for (const PolyRow& row : sj.rows) {
        const auto top = optimize_over(s0, row.coeffs, ObjectiveSense::Maximize);
        if (top && *top > row.rhs + kTol) {
            return true;
        }
    }
    for (int a = 0; a < sj.num_arcs(); ++a) {
        const ArcCoefficients unit{{a, 1.0}};
        if (sj.upper[a] < s0.upper[a] - kTol &&
            *optimize_over(s0, unit, ObjectiveSense::Maximize) > sj.upper[a] + kTol) {
            return true;
        }
        if (sj.lower[a] > s0.lower[a] + kTol &&
            *optimize_over(s0, unit, ObjectiveSense::Minimize) < sj.lower[a] - kTol) {
            return true;
        }
    }
    return false;
}

Example1 build_example1() {
    const std::vector<Arc> arcs{{1, 2}, {1, 3}, {2, 4}, {2, 5}, {3, 6}, {3, 7}, {4, 8}, {5, 8}, {6, 8}, {7, 8}};
    Example1 ex{Graph(8, 1, 8, arcs), {}, {}};
    ex.ambiguity = AmbiguitySet::with_support(ex.graph.num_arcs(), 0.0, 0.0);
    const int mid[4] = {ex.graph.find_arc(2, 4), ex.graph.find_arc(2, 5), ex.graph.find_arc(3, 6),
                        ex.graph.find_arc(3, 7)};
    ExpectationRow budget;
    for (int a : mid) {
        ex.ambiguity.per_arc[a].front().u = 1.0;
        budget.coeffs.push_back({a, 1.0});
    }
    budget.rhs = 1.0;
    ex.ambiguity.rows.push_back(budget);

    AuxiliaryConstraint diff;
    diff.node = 2;
    diff.kind = AuxKind::Expectation;
    diff.family = AuxFamily::Difference;
    diff.coeffs = {{mid[0], 1.0}, {mid[1], -1.0}};
    diff.rhs = 0.0;
    ex.auxiliary.push_back(diff);
    return ex;
}

} // namespace drspp
