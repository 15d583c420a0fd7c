#pragma once

#include "drspp/graph.hpp"
#include "drspp/model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace drspp {

/// Sparse linear form over arc indices.
using ArcCoefficients = std::vector<std::pair<int, double>>;

/// Q{c_a in [l, u]} in [q_lo, q_hi].
struct ProbabilityConstraint {
    int arc = 0;
    double l = 0.0;
    double u = 1.0;
    double q_lo = 1.0;
    double q_hi = 1.0;
};

enum class ExpectationSense { LessEqual, Equal };

/// One row of E{B c} <= b (or = b).
struct ExpectationRow {
    ArcCoefficients coeffs;
    double rhs = 0.0;
    ExpectationSense sense = ExpectationSense::LessEqual;
};

struct AmbiguitySet {
    /// per_arc[a][0] is the support constraint of arc a.
    std::vector<std::vector<ProbabilityConstraint>> per_arc;
    std::vector<ExpectationRow> rows;

    [[nodiscard]] int num_arcs() const { return static_cast<int>(per_arc.size()); }
    /// Support [l, u] with probability one on every arc.
    static AmbiguitySet with_support(int num_arcs, double l, double u);
    /// Throws InvalidArgument when the invariants do not hold.
    void validate() const;
};

enum class AuxKind { Probability, Expectation };

/// Construction family; drives the forced-resolution rule during verification.
enum class AuxFamily { Individual, Difference, Sum, Probability, Other };

struct AuxiliaryConstraint {
    int node = 0;
    AuxKind kind = AuxKind::Expectation;
    AuxFamily family = AuxFamily::Other;
    // Probability kind: Q{c_arc in [l, u]} <= q_tilde.
    int arc = -1;
    double l = 0.0;
    double u = 1.0;
    double q_tilde = 0.5;
    // Expectation kind: E{sum p_a c_a} <= rhs.
    ArcCoefficients coeffs;
    double rhs = 0.0;

    /// Arcs read by the constraint.
    [[nodiscard]] std::vector<int> arcs() const;
    /// Throws InvalidArgument when the constraint leaves the forward star of its node.
    void validate(const Graph& g) const;
};

using AuxiliaryList = std::vector<AuxiliaryConstraint>;

struct ResponseVector {
    /// bits[m] = 1 when constraint m is satisfied.
    std::vector<int> bits;

    /// Scenario index j = 1 + sum_m bits[m] 2^m.
    [[nodiscard]] int index() const;
    static ResponseVector from_index(int j, int length);
};

/// One row of B c <= b over expected arc costs.
struct PolyRow {
    ArcCoefficients coeffs;
    double rhs = 0.0;
};

/// Box [L, U] per arc plus rows; an empty box (L > U) encodes an empty set.
struct Polyhedron {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<PolyRow> rows;

    [[nodiscard]] int num_arcs() const { return static_cast<int>(lower.size()); }
    [[nodiscard]] bool box_empty() const;
};

struct ExpectationBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Infimum and supremum of E{c_a} over distributions meeting the interval probability
/// constraints. Throws InfeasibleAmbiguity when no distribution qualifies.
ExpectationBounds marginal_expectation_bounds(const std::vector<ProbabilityConstraint>& constraints);

Polyhedron build_S0(const AmbiguitySet& amb);

Polyhedron partition(const Polyhedron& s0, const AmbiguitySet& amb, const AuxiliaryList& list,
                     const ResponseVector& r);

bool is_feasible(const Polyhedron& p);

/// True when some row or box bound of sj cuts off part of s0.
bool refines(const Polyhedron& s0, const Polyhedron& sj);

/// Optimum of sum p_a c_a over p, or nullopt when p is empty.
std::optional<double> optimize_over(const Polyhedron& p, const ArcCoefficients& coeffs, ObjectiveSense sense);

/// Maximizer and value of sum p_a c_a over p, or nullopt when p is empty.
std::optional<std::pair<double, std::vector<double>>> argmax_over(const Polyhedron& p,
                                                                  const ArcCoefficients& coeffs);

/// The introductory network with its ambiguity set and single difference constraint at node 2.
struct Example1 {
    Graph graph;
    AmbiguitySet ambiguity;
    AuxiliaryList auxiliary;
};

Example1 build_example1();

} // namespace drspp
