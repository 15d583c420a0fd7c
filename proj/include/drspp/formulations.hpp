#pragma once

#include "drspp/ambiguity.hpp"
#include "drspp/graph.hpp"
#include "drspp/model.hpp"
#include "drspp/solver.hpp"

#include <vector>

namespace drspp {

/// Model plus the variable maps needed to read a solution back.
struct StaticModel {
    MixedIntegerProgram mip;
    std::vector<int> y;
    std::vector<int> lambda;
};

struct MaxMinModel {
    LinearProgram lp;
    std::vector<int> cost;
    /// Indexed by node id; entry 0 unused.
    std::vector<int> mu;
};

enum class NonAnticipativityMode { Auto, Acyclic, General };

struct MultiStageModel {
    MixedIntegerProgram mip;
    int z = -1;
    /// y[j - 1][a], lambda[j - 1][k], t[j - 1][i] (t empty in acyclic mode).
    std::vector<std::vector<int>> y;
    std::vector<std::vector<int>> lambda;
    std::vector<std::vector<int>> t;
    NonAnticipativityMode mode = NonAnticipativityMode::Acyclic;
    /// Scenario indices whose partition is empty.
    std::vector<int> empty_scenarios;
};

inline constexpr int kDefaultScenarioCap = 12;

/// Flow conservation and visit-once rows over the given arc variables.
void add_path_rows(MixedIntegerProgram& mip, const Graph& g, const std::vector<int>& y, const std::string& tag);

/// Rows of B0 including the box as +I <= U and -I <= -L.
std::vector<PolyRow> dual_rows(const Polyhedron& p);

StaticModel build_static_mip(const Graph& g, const Polyhedron& s0);

MaxMinModel build_maxmin_lp(const Graph& g, const Polyhedron& s0);

MultiStageModel build_multistage_mip(const Graph& g, const std::vector<Polyhedron>& partitions,
                                     const AuxiliaryList& list,
                                     NonAnticipativityMode mode = NonAnticipativityMode::Auto,
                                     int scenario_cap = kDefaultScenarioCap);

/// max c^T y over s. Throws PosteriorInfeasible when s is empty.
LinearProgram build_posterior_lp(const Graph& g, const PathIncidence& y, const Polyhedron& s);

/// All 2^|L| partitions in scenario order.
std::vector<Polyhedron> build_partitions(const Polyhedron& s0, const AmbiguitySet& amb, const AuxiliaryList& list,
                                         int scenario_cap = kDefaultScenarioCap);

struct StaticSolution {
    MipOutcome outcome;
    PathIncidence y;
};

struct MultiStagePolicy {
    MipOutcome outcome;
    double objective = 0.0;
    std::vector<PathIncidence> y;
    std::vector<std::vector<double>> t;
    std::vector<std::vector<double>> lambda;
    NonAnticipativityMode mode = NonAnticipativityMode::Acyclic;
};

StaticSolution solve_static(const Graph& g, const Polyhedron& s0, const MipLimits& limits = {},
                            const SolverOptions& options = {});

/// z_lower. Throws InvalidArgument when s0 is empty.
double solve_maxmin(const Graph& g, const Polyhedron& s0, const SolverOptions& options = {});

MultiStagePolicy solve_multistage(const Graph& g, const std::vector<Polyhedron>& partitions,
                                  const AuxiliaryList& list,
                                  NonAnticipativityMode mode = NonAnticipativityMode::Auto,
                                  const MipLimits& limits = {}, const SolverOptions& options = {},
                                  int scenario_cap = kDefaultScenarioCap);

/// Worst-case expected cost of path y over s. Throws PosteriorInfeasible when s is empty.
double solve_posterior(const Graph& g, const PathIncidence& y, const Polyhedron& s, const SolverOptions& options = {});

const char* to_string(NonAnticipativityMode mode);

} // namespace drspp
