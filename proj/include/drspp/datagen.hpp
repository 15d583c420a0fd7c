#pragma once

#include "drspp/ambiguity.hpp"
#include "drspp/graph.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace drspp {

/// Beta(alpha, beta) marginal with the given mean and standard deviation.
struct NominalMarginal {
    int arc = 0;
    double mean = 0.5;
    double stddev = 0.125;
    double alpha = 1.0;
    double beta = 1.0;
};

/// Row-major matrix of cost samples, one column per arc.
struct SampleSet {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;
    std::uint64_t seed = 0;

    [[nodiscard]] double at(int k, int a) const { return data[static_cast<std::size_t>(k) * cols + a]; }
    /// Same samples repeated `times` times.
    [[nodiscard]] SampleSet replicated(int times) const;
};

/// Per-arc marginals; mirrored arcs share one marginal and one draw.
struct NominalModel {
    std::vector<NominalMarginal> marginals;
    /// Arc whose draw arc a copies (itself for the first arc of a mirrored pair).
    std::vector<int> representative;

    [[nodiscard]] SampleSet sample(int n, std::uint64_t seed) const;
};

enum class AuxMode { Expectation, Probability };

struct InstanceConfig {
    int h = 3;
    int r = 3;
    GraphClass graph = GraphClass::Acyclic;
    double kappa = 0.5;
    int n_train = 60;
    int n_verify = 60;
    double eta = 0.95;
    double gamma = 0.95;
    double sigma = 0.125;
    int num_aux = 1;
    AuxMode aux_mode = AuxMode::Expectation;
    double q_tilde = 0.5;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Purposes of the derived random streams.
enum class Stream : std::uint64_t { Means = 1, Train = 2, Verify = 3, Sensors = 4, Picks = 5, Coins = 6 };

std::uint64_t derive_seed(std::uint64_t root, Stream purpose);

/// Open interval of admissible means for a beta law with standard deviation sigma.
std::pair<double, double> mean_interval(double sigma);

/// Shapes matching mean m and standard deviation sigma. Throws MeanOutOfRange.
std::pair<double, double> beta_params(double m, double sigma);

NominalModel sample_nominal(const Graph& g, double sigma, std::uint64_t seed);

/// Support [0, 1] per arc, one budget row per node, and equalities between mirrored arcs.
AmbiguitySet build_initial_ambiguity(const Graph& g, const SampleSet& train, double eta);

/// Independent Bernoulli(kappa) per node, in node order.
std::vector<int> place_sensors(const Graph& g, double kappa, std::uint64_t seed);

struct AuxiliaryGeneration {
    AuxiliaryList list;
    std::vector<int> sensors;
    int replacements = 0;
};

/// Candidate constraints available under a sensor placement, grouped by node and family.
AuxiliaryList auxiliary_candidates(const Graph& g, const std::vector<int>& sensors, AuxMode mode, double q_tilde);

/// Draws `count` distinct constraints; re-places sensors with probability kappa when the
/// candidates run out. Throws GenerationStalled after 100 re-placements.
AuxiliaryGeneration generate_auxiliary(const Graph& g, const std::vector<int>& sensors, const Polyhedron& s0,
                                       int count, AuxMode mode, double q_tilde, double kappa, std::uint64_t seed);

struct Instance {
    InstanceConfig config;
    /// Root seed actually used after degenerate-instance regeneration.
    std::uint64_t effective_seed = 0;
    int regenerations = 0;
    Graph graph;
    NominalModel nominal;
    SampleSet train;
    SampleSet verify;
    AmbiguitySet ambiguity;
    std::vector<int> sensors;
    AuxiliaryList auxiliary;
};

/// Builds a reproducible instance from the configuration; regenerates with an incremented seed
/// while the static and max-min values coincide.
Instance generate_instance(const InstanceConfig& config);

const char* to_string(AuxFamily family);
const char* to_string(AuxMode mode);

} // namespace drspp
