#include "drspp/solver.hpp"

#include "drspp/errors.hpp"
#include "simplex_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <queue>

namespace drspp {

namespace {

std::vector<double> bounds_of(const LinearProgram& lp, bool upper) {
    std::vector<double> b(lp.num_variables());
    for (int j = 0; j < lp.num_variables(); ++j) {
        b[j] = upper ? lp.variable(j).upper : lp.variable(j).lower;
    }
    return b;
}

struct BoundChange {
    int var;
    double lower;
    double upper;
};

struct Node {
    double bound = 0.0;
    int depth = 0;
    long order = 0;
    std::vector<BoundChange> changes;
    std::shared_ptr<const detail::Basis> basis;
};

struct NodeOrder {
    bool operator()(const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) const {
        if (a->bound != b->bound) {
            return a->bound > b->bound;
        }
        if (a->depth != b->depth) {
            return a->depth < b->depth;
        }
        return a->order > b->order;
    }
};

} // namespace

LpOutcome solve_lp(const LinearProgram& lp, const SolverOptions& options) {
    detail::SimplexEngine engine(lp, options);
    detail::EngineResult r = engine.solve(bounds_of(lp, false), bounds_of(lp, true), nullptr, nullptr);
    LpOutcome out;
    out.status = r.status;
    out.iterations = r.iterations;
    if (r.status != LpStatus::Optimal) {
        return out;
    }
    const double s = lp.sense == ObjectiveSense::Maximize ? -1.0 : 1.0;
    out.values = std::move(r.x);
    out.objective = s * r.objective;
    out.duals.resize(r.pi.size());
    for (std::size_t i = 0; i < r.pi.size(); ++i) {
        out.duals[i] = s * r.pi[i];
    }
    out.reduced_costs.resize(r.reduced.size());
    for (std::size_t j = 0; j < r.reduced.size(); ++j) {
        out.reduced_costs[j] = s * r.reduced[j];
    }
    return out;
}

MipOutcome solve_mip(const MixedIntegerProgram& mip, const MipLimits& limits, const SolverOptions& options,
                     const std::function<void(const NodeTrace&)>& trace) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const LinearProgram& lp = mip.lp;
    const int n = lp.num_variables();
    const double sign = lp.sense == ObjectiveSense::Maximize ? -1.0 : 1.0;
    const std::vector<double> base_lower = bounds_of(lp, false);
    const std::vector<double> base_upper = bounds_of(lp, true);
    const std::vector<bool>& integer = mip.integer_flags();

    detail::SimplexEngine engine(lp, options);
    MipOutcome out;
    double incumbent = kInf;
    std::vector<double> best;

    auto prune_level = [&]() {
        if (incumbent == kInf) {
            return kInf;
        }
        return incumbent - std::max(options.gap_abs, options.gap_rel * std::abs(incumbent));
    };
    auto elapsed = [&]() { return std::chrono::duration<double>(Clock::now() - start).count(); };

    std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, NodeOrder> open;
    long created = 0;
    auto root = std::make_shared<Node>();
    root->bound = -kInf;
    root->order = created++;
    open.push(root);

    std::vector<double> lower(n);
    std::vector<double> upper(n);
    bool stopped = false;
    while (!open.empty()) {
        std::shared_ptr<Node> node = open.top();
        if (node->bound >= prune_level()) {
            open.pop();
            continue;
        }
        if (out.nodes >= limits.nodes) {
            out.status = MipStatus::NodeLimit;
            stopped = true;
            break;
        }
        if (elapsed() > limits.time_seconds) {
            out.status = MipStatus::TimeLimit;
            stopped = true;
            break;
        }
        open.pop();

        lower = base_lower;
        upper = base_upper;
        for (const BoundChange& c : node->changes) {
            lower[c.var] = c.lower;
            upper[c.var] = c.upper;
        }
        auto basis = std::make_shared<detail::Basis>();
        const detail::Basis* warm = options.warm_start_children ? node->basis.get() : nullptr;
        detail::EngineResult r;
        try {
            r = engine.solve(lower, upper, warm, basis.get());
        } catch (const NumericalFailure&) {
            if (warm == nullptr) {
                throw;
            }
            // A different pivot path from the slack basis usually avoids the trouble.
            r = engine.solve(lower, upper, nullptr, basis.get());
        }
        ++out.nodes;
        out.lp_iterations += r.iterations;

        if (r.status == LpStatus::Unbounded) {
            throw InvalidArgument("relaxation is unbounded");
        }
        const bool feasible = r.status == LpStatus::Optimal;
        const double value = feasible ? r.objective : kInf;
        if (trace) {
            trace(NodeTrace{out.nodes, node->depth, sign * value, sign * incumbent, !best.empty()});
        }
        if (!feasible || value >= prune_level()) {
            continue;
        }

        int branch = -1;
        double most = 0.0;
        for (int j = 0; j < n; ++j) {
            if (!integer[j]) {
                continue;
            }
            const double frac = r.x[j] - std::floor(r.x[j]);
            const double dist = std::min(frac, 1.0 - frac);
            if (dist > options.integrality_tol && dist > most) {
                most = dist;
                branch = j;
            }
        }
        if (branch < 0) {
            incumbent = value;
            best = std::move(r.x);
            for (int j = 0; j < n; ++j) {
                if (integer[j]) {
                    best[j] = std::round(best[j]);
                }
            }
            continue;
        }

        std::shared_ptr<const detail::Basis> shared = std::move(basis);
        const double v = r.x[branch];
        auto down = std::make_shared<Node>();
        down->bound = value;
        down->depth = node->depth + 1;
        down->order = created++;
        down->changes = node->changes;
        down->changes.push_back({branch, lower[branch], std::floor(v)});
        down->basis = shared;
        auto up = std::make_shared<Node>();
        up->bound = value;
        up->depth = node->depth + 1;
        up->order = created++;
        up->changes = std::move(node->changes);
        up->changes.push_back({branch, std::ceil(v), upper[branch]});
        up->basis = shared;
        open.push(std::move(down));
        open.push(std::move(up));
    }

    out.has_incumbent = !best.empty();
    if (out.has_incumbent) {
        out.values = best;
        out.objective = sign * incumbent;
    }
    if (stopped) {
        double lowest = incumbent;
        while (!open.empty()) {
            lowest = std::min(lowest, open.top()->bound);
            open.pop();
        }
        out.bound = sign * lowest;
    } else {
        out.status = out.has_incumbent ? MipStatus::Optimal : MipStatus::Infeasible;
        out.bound = out.objective;
    }
    out.wall_seconds = elapsed();
    return out;
}

std::function<void(const NodeTrace&)> trace_to(std::ostream& out) {
    return [&out](const NodeTrace& t) {
        out << "node " << t.node << " depth " << t.depth << " bound " << t.bound << " incumbent ";
        if (t.has_incumbent) {
            out << t.incumbent;
        } else {
            out << '-';
        }
        out << '\n';
    };
}

const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal:
        return "optimal";
    case LpStatus::Infeasible:
        return "infeasible";
    case LpStatus::Unbounded:
        return "unbounded";
    }
    return "unknown";
}

const char* to_string(MipStatus s) {
    switch (s) {
    case MipStatus::Optimal:
        return "optimal";
    case MipStatus::Infeasible:
        return "infeasible";
    case MipStatus::TimeLimit:
        return "time_limit";
    case MipStatus::NodeLimit:
        return "node_limit";
    }
    return "unknown";
}

} // namespace drspp
