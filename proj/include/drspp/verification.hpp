#pragma once

#include "drspp/ambiguity.hpp"
#include "drspp/datagen.hpp"
#include "drspp/formulations.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace drspp {

/// Hoeffding radius range * sqrt(ln(2 / (1 - confidence)) / (2 n)).
double hoeffding_epsilon(int n, double confidence, double range);

enum class Verdict { Satisfied, Violated, Undetermined };

struct VerificationResult {
    int index = 0;
    Verdict verdict = Verdict::Undetermined;
    double statistic = 0.0;
    double epsilon = 0.0;
    double threshold = 0.0;
};

/// Hoeffding test of one auxiliary constraint on held-out samples. Only the constraint's
/// columns are read; sample costs are assumed to lie in [support_lo, support_hi].
VerificationResult verify_constraint(const AuxiliaryConstraint& c, const SampleSet& samples, double gamma,
                                     int index = 0, double support_lo = 0.0, double support_hi = 1.0);

enum class Provenance { Verified, ForcedWorstCase, ForcedCoin };

struct ForcedBit {
    int bit = 0;
    Provenance provenance = Provenance::ForcedWorstCase;
};

/// Individual, sum and probability constraints resolve to violated; difference constraints
/// to a fair coin.
ForcedBit force_resolution(const AuxiliaryConstraint& c, std::mt19937_64& rng);

struct ResolvedResponses {
    ResponseVector r;
    std::vector<Provenance> provenance;
    std::vector<VerificationResult> results;
};

/// Verifies every constraint of the list and forces the undetermined ones.
ResolvedResponses resolve_responses(const AuxiliaryList& list, const SampleSet& samples, double gamma,
                                    std::uint64_t coin_seed);

struct WalkResult {
    PathIncidence y;
    int scenario = 0;
    std::vector<int> visited;
};

/// Walks the policy from the source, revealing the bits of constraints attached to each visited
/// node. Throws NonAnticipativityViolation when surviving scenarios prescribe different arcs.
WalkResult simulate_walk(const MultiStagePolicy& policy, const AuxiliaryList& list,
                         const ResolvedResponses& responses, const Graph& g);

/// One JSON object per constraint: index, statistic, epsilon, threshold, verdict, provenance, bit.
void write_verification_trace(std::ostream& out, const ResolvedResponses& responses);

const char* to_string(Verdict v);
const char* to_string(Provenance p);

} // namespace drspp
