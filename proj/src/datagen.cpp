#include "drspp/datagen.hpp"

#include "drspp/errors.hpp"
#include "drspp/formulations.hpp"
#include "drspp/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

namespace drspp {

namespace {

constexpr int kMaxReplacements = 100;
constexpr int kMaxRegenerations = 1000;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Logarithm of a Gamma(shape, 1) draw. Small shapes use Gamma(a) = Gamma(a + 1) * U^(1/a), since
// the direct draw underflows to zero when the mean sits near the edge of its admissible interval.
double draw_log_gamma(std::mt19937_64& rng, double shape) {
    if (shape >= 1.0) {
        std::gamma_distribution<double> g(shape, 1.0);
        return std::log(g(rng));
    }
    std::gamma_distribution<double> g(shape + 1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double lg = std::log(g(rng));
    double u = unit(rng);
    while (u <= 0.0) {
        u = unit(rng);
    }
    return lg + std::log(u) / shape;
}

double draw_beta(std::mt19937_64& rng, double alpha, double beta) {
    const double lx = draw_log_gamma(rng, alpha);
    const double ly = draw_log_gamma(rng, beta);
    // x / (x + y) = 1 / (1 + exp(ly - lx))
    return 1.0 / (1.0 + std::exp(ly - lx));
}

bool contains(const std::vector<int>& sorted, int v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

} // namespace

SampleSet SampleSet::replicated(int times) const {
    SampleSet out = *this;
    out.rows = rows * times;
    out.data.clear();
    for (int t = 0; t < times; ++t) {
        out.data.insert(out.data.end(), data.begin(), data.end());
    }
    return out;
}

SampleSet NominalModel::sample(int n, std::uint64_t seed) const {
    if (n < 1) {
        throw InvalidArgument("sample size must be positive");
    }
    const int cols = static_cast<int>(marginals.size());
    SampleSet s{n, cols, std::vector<double>(static_cast<std::size_t>(n) * cols), seed};
    std::mt19937_64 rng(seed);
    for (int k = 0; k < n; ++k) {
        for (int a = 0; a < cols; ++a) {
            double& cell = s.data[static_cast<std::size_t>(k) * cols + a];
            if (representative[a] == a) {
                cell = draw_beta(rng, marginals[a].alpha, marginals[a].beta);
            } else {
                cell = s.at(k, representative[a]);
            }
        }
    }
    return s;
}

void InstanceConfig::validate() const {
    auto open_unit = [](double p) { return p > 0.0 && p < 1.0; };
    if (h < 1 || r < 1) {
        throw InvalidArgument("h and r must be at least 1");
    }
    if (!(kappa > 0.0 && kappa <= 1.0)) {
        throw InvalidArgument("kappa must lie in (0, 1]");
    }
    if (n_train < 1 || n_verify < 1) {
        throw InvalidArgument("sample counts must be positive");
    }
    if (!open_unit(eta) || !open_unit(gamma)) {
        throw InvalidArgument("confidence levels must lie in (0, 1)");
    }
    if (!(sigma > 0.0 && sigma < 0.5)) {
        throw InvalidArgument("sigma must lie in (0, 0.5)");
    }
    if (num_aux < 0) {
        throw InvalidArgument("auxiliary count must be nonnegative");
    }
    if (!(q_tilde >= 0.0 && q_tilde <= 1.0)) {
        throw InvalidArgument("q_tilde must lie in [0, 1]");
    }
}

std::uint64_t derive_seed(std::uint64_t root, Stream purpose) {
    return splitmix64(root * 0x100000001b3ULL + static_cast<std::uint64_t>(purpose));
}

std::pair<double, double> mean_interval(double sigma) {
    const double half = 0.5 * std::sqrt(1.0 - 4.0 * sigma * sigma);
    return {0.5 - half, 0.5 + half};
}

std::pair<double, double> beta_params(double m, double sigma) {
    if (!(sigma > 0.0 && sigma < 0.5)) {
        throw MeanOutOfRange("standard deviation must lie in (0, 0.5)");
    }
    const auto [lo, hi] = mean_interval(sigma);
    if (!(m > lo && m < hi)) {
        throw MeanOutOfRange("mean " + std::to_string(m) + " admits no beta law with this deviation");
    }
    const double alpha = m * m * (1.0 - m) / (sigma * sigma) - m;
    const double beta = alpha * (1.0 / m - 1.0);
    if (!(alpha > 0.0 && beta > 0.0)) {
        throw MeanOutOfRange("beta shapes are not positive");
    }
    return {alpha, beta};
}

NominalModel sample_nominal(const Graph& g, double sigma, std::uint64_t seed) {
    const auto [lo, hi] = mean_interval(sigma);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(lo, hi);
    NominalModel model;
    model.marginals.resize(g.num_arcs());
    model.representative.resize(g.num_arcs());
    for (int a = 0; a < g.num_arcs(); ++a) {
        const int twin = g.reverse_of(a);
        if (twin >= 0 && twin < a) {
            model.representative[a] = twin;
            model.marginals[a] = model.marginals[twin];
            model.marginals[a].arc = a;
            continue;
        }
        model.representative[a] = a;
        for (;;) {
            const double m = uniform(rng);
            if (m <= lo || m >= hi) {
                continue;
            }
            const auto [alpha, beta] = beta_params(m, sigma);
            model.marginals[a] = NominalMarginal{a, m, sigma, alpha, beta};
            break;
        }
    }
    return model;
}

AmbiguitySet build_initial_ambiguity(const Graph& g, const SampleSet& train, double eta) {
    if (train.rows < 1 || train.cols != g.num_arcs()) {
        throw InvalidArgument("training samples must cover every arc");
    }
    AmbiguitySet amb = AmbiguitySet::with_support(g.num_arcs(), 0.0, 1.0);
    const double eta_i = 1.0 - (1.0 - eta) / g.num_nodes();
    for (int i = 1; i <= g.num_nodes(); ++i) {
        std::vector<double> coef(g.num_arcs(), 0.0);
        for (int a : g.reverse_star(i)) {
            coef[a] = 1.0;
        }
        for (int a : g.forward_star(i)) {
            // A two-way road is counted once, through its incoming direction.
            coef[a] = g.reverse_of(a) >= 0 ? 0.0 : 1.0;
        }
        ExpectationRow row;
        for (int a = 0; a < g.num_arcs(); ++a) {
            if (coef[a] != 0.0) {
                row.coeffs.push_back({a, coef[a]});
            }
        }
        if (row.coeffs.empty()) {
            continue;
        }
        double mean = 0.0;
        for (int k = 0; k < train.rows; ++k) {
            double sum = 0.0;
            for (const auto& [a, v] : row.coeffs) {
                sum += v * train.at(k, a);
            }
            mean += sum;
        }
        mean /= train.rows;
        row.rhs = mean + hoeffding_epsilon(train.rows, eta_i, static_cast<double>(row.coeffs.size()));
        amb.rows.push_back(std::move(row));
    }
    for (int a = 0; a < g.num_arcs(); ++a) {
        const int twin = g.reverse_of(a);
        if (twin > a) {
            amb.rows.push_back(ExpectationRow{{{a, 1.0}, {twin, -1.0}}, 0.0, ExpectationSense::Equal});
        }
    }
    return amb;
}

std::vector<int> place_sensors(const Graph& g, double kappa, std::uint64_t seed) {
    if (!(kappa > 0.0 && kappa <= 1.0)) {
        throw InvalidArgument("kappa must lie in (0, 1]");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> sensors;
    for (int i = 1; i <= g.num_nodes(); ++i) {
        if (unit(rng) < kappa) {
            sensors.push_back(i);
        }
    }
    return sensors;
}

AuxiliaryList auxiliary_candidates(const Graph& g, const std::vector<int>& sensors, AuxMode mode, double q_tilde) {
    AuxiliaryList out;
    for (int o = 1; o <= g.num_nodes(); ++o) {
        if (o == g.sink()) {
            continue;
        }
        std::vector<int> forward;
        for (int a : g.forward_star(o)) {
            if (g.arc(a).tail < g.arc(a).head) {
                forward.push_back(a);
            }
        }
        std::sort(forward.begin(), forward.end(), [&](int a, int b) { return g.arc(a).head < g.arc(b).head; });
        const bool tail_sensed = contains(sensors, o);
        for (int a : forward) {
            if (!tail_sensed || !contains(sensors, g.arc(a).head)) {
                continue;
            }
            AuxiliaryConstraint c;
            c.node = o;
            if (mode == AuxMode::Probability) {
                c.kind = AuxKind::Probability;
                c.family = AuxFamily::Probability;
                c.arc = a;
                c.l = 0.5;
                c.u = 1.0;
                c.q_tilde = q_tilde;
            } else {
                c.kind = AuxKind::Expectation;
                c.family = AuxFamily::Individual;
                c.coeffs = {{a, 1.0}};
            }
            out.push_back(std::move(c));
        }
        if (mode == AuxMode::Probability) {
            continue;
        }
        bool sensed_predecessor = false;
        for (int e : g.reverse_star(o)) {
            sensed_predecessor = sensed_predecessor || contains(sensors, g.arc(e).tail);
        }
        for (std::size_t x = 0; x < forward.size(); ++x) {
            for (std::size_t y = x + 1; y < forward.size(); ++y) {
                const int a = forward[x];
                const int b = forward[y];
                if (!contains(sensors, g.arc(a).head) || !contains(sensors, g.arc(b).head)) {
                    continue;
                }
                if (!tail_sensed && sensed_predecessor) {
                    AuxiliaryConstraint c;
                    c.node = o;
                    c.kind = AuxKind::Expectation;
                    c.family = AuxFamily::Difference;
                    c.coeffs = {{a, 1.0}, {b, -1.0}};
                    out.push_back(std::move(c));
                }
                if (g.reverse_of(a) >= 0 || g.reverse_of(b) >= 0) {
                    AuxiliaryConstraint c;
                    c.node = o;
                    c.kind = AuxKind::Expectation;
                    c.family = AuxFamily::Sum;
                    c.coeffs = {{a, 1.0}, {b, 1.0}};
                    out.push_back(std::move(c));
                }
            }
        }
    }
    return out;
}

AuxiliaryGeneration generate_auxiliary(const Graph& g, const std::vector<int>& sensors, const Polyhedron& s0,
                                       int count, AuxMode mode, double q_tilde, double kappa, std::uint64_t seed) {
    if (count < 0) {
        throw InvalidArgument("auxiliary count must be nonnegative");
    }
    AuxiliaryGeneration gen;
    gen.sensors = sensors;
    std::mt19937_64 rng(seed);
    if (count == 0) {
        return gen;
    }
    for (;;) {
        AuxiliaryList pool = auxiliary_candidates(g, gen.sensors, mode, q_tilde);
        AuxiliaryList chosen;
        while (static_cast<int>(chosen.size()) < count && !pool.empty()) {
            std::vector<int> nodes;
            for (const AuxiliaryConstraint& c : pool) {
                nodes.push_back(c.node);
            }
            std::sort(nodes.begin(), nodes.end());
            nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
            const int node = nodes[std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng)];
            std::vector<AuxFamily> families;
            for (const AuxiliaryConstraint& c : pool) {
                if (c.node == node && std::find(families.begin(), families.end(), c.family) == families.end()) {
                    families.push_back(c.family);
                }
            }
            std::sort(families.begin(), families.end());
            const AuxFamily family = families[std::uniform_int_distribution<std::size_t>(0, families.size() - 1)(rng)];
            std::vector<std::size_t> options;
            for (std::size_t k = 0; k < pool.size(); ++k) {
                if (pool[k].node == node && pool[k].family == family) {
                    options.push_back(k);
                }
            }
            const std::size_t pick = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
            AuxiliaryConstraint c = pool[pick];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            if (c.kind == AuxKind::Expectation) {
                const auto low = optimize_over(s0, c.coeffs, ObjectiveSense::Minimize);
                const auto high = optimize_over(s0, c.coeffs, ObjectiveSense::Maximize);
                if (!low || !high || *high - *low <= 1e-9) {
                    continue;
                }
                c.rhs = 0.5 * (*low + *high);
            }
            chosen.push_back(std::move(c));
        }
        if (static_cast<int>(chosen.size()) == count) {
            gen.list = std::move(chosen);
            return gen;
        }
        if (gen.replacements == kMaxReplacements) {
            throw GenerationStalled("could not collect " + std::to_string(count) + " auxiliary constraints after " +
                                    std::to_string(kMaxReplacements) + " sensor placements");
        }
        ++gen.replacements;
        gen.sensors = place_sensors(g, kappa, rng());
    }
}

Instance generate_instance(const InstanceConfig& config) {
    config.validate();
    Instance inst;
    inst.config = config;
    inst.graph = build_layered(config.h, config.r, config.graph);
    for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
        const std::uint64_t root = config.seed + static_cast<std::uint64_t>(attempt);
        inst.nominal = sample_nominal(inst.graph, config.sigma, derive_seed(root, Stream::Means));
        inst.train = inst.nominal.sample(config.n_train, derive_seed(root, Stream::Train));
        inst.verify = inst.nominal.sample(config.n_verify, derive_seed(root, Stream::Verify));
        inst.ambiguity = build_initial_ambiguity(inst.graph, inst.train, config.eta);
        const Polyhedron s0 = build_S0(inst.ambiguity);
        const StaticSolution st = solve_static(inst.graph, s0);
        const double lower = solve_maxmin(inst.graph, s0);
        if (st.outcome.objective - lower <= 1e-9) {
            ++inst.regenerations;
            continue;
        }
        inst.effective_seed = root;
        const std::vector<int> sensors = place_sensors(inst.graph, config.kappa, derive_seed(root, Stream::Sensors));
        AuxiliaryGeneration gen = generate_auxiliary(inst.graph, sensors, s0, config.num_aux, config.aux_mode,
                                                     config.q_tilde, config.kappa, derive_seed(root, Stream::Picks));
        inst.sensors = std::move(gen.sensors);
        inst.auxiliary = std::move(gen.list);
        return inst;
    }
    throw GenerationStalled("every regenerated instance had coinciding static and max-min values");
}

const char* to_string(AuxFamily family) {
    switch (family) {
    case AuxFamily::Individual:
        return "individual";
    case AuxFamily::Difference:
        return "difference";
    case AuxFamily::Sum:
        return "sum";
    case AuxFamily::Probability:
        return "probability";
    case AuxFamily::Other:
        return "other";
    }
    return "other";
}

const char* to_string(AuxMode mode) {
    return mode == AuxMode::Probability ? "probability" : "expectation";
}

} // namespace drspp
