#pragma once

#include "drspp/model.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

namespace drspp {

struct SolverOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-9;
    double integrality_tol = 1e-6;
    double gap_abs = 1e-6;
    double gap_rel = 1e-9;
    /// Basis refactorization period (product-form updates in between).
    int refactor_interval = 64;
    /// Zero means 20 * (rows + columns) + 5000.
    long max_iterations = 0;
    /// Branch-and-bound children restart from the parent's optimal basis.
    bool warm_start_children = true;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    /// Row duals in the objective's own sense: d objective / d rhs.
    std::vector<double> duals;
    /// Structural reduced costs in the objective's own sense.
    std::vector<double> reduced_costs;
    long iterations = 0;
};

/// Bounded revised simplex on a sparse LU basis (Dantzig pricing, Harris ratio test, Bland fallback
/// on stalls).
/// Throws NumericalFailure when the pivot budget is exhausted.
LpOutcome solve_lp(const LinearProgram& lp, const SolverOptions& options = {});

enum class MipStatus { Optimal, Infeasible, TimeLimit, NodeLimit };

struct MipLimits {
    double time_seconds = std::numeric_limits<double>::infinity();
    long nodes = std::numeric_limits<long>::max();
};

struct MipOutcome {
    MipStatus status = MipStatus::Infeasible;
    bool has_incumbent = false;
    std::vector<double> values;
    double objective = 0.0;
    double bound = 0.0;
    long nodes = 0;
    long lp_iterations = 0;
    double wall_seconds = 0.0;
};

struct NodeTrace {
    long node = 0;
    int depth = 0;
    double bound = 0.0;
    double incumbent = 0.0;
    bool has_incumbent = false;
};

/// Best-bound branch and bound over LP relaxations; most fractional variable branching.
MipOutcome solve_mip(const MixedIntegerProgram& mip, const MipLimits& limits = {},
                     const SolverOptions& options = {},
                     const std::function<void(const NodeTrace&)>& trace = {});

/// Trace sink writing one line per node.
std::function<void(const NodeTrace&)> trace_to(std::ostream& out);

const char* to_string(LpStatus s);
const char* to_string(MipStatus s);

} // namespace drspp
