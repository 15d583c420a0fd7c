#include "drspp/verification.hpp"

#include "drspp/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace drspp {

double hoeffding_epsilon(int n, double confidence, double range) {
    if (n < 1 || !(confidence > 0.0 && confidence < 1.0) || !(range > 0.0)) {
        throw InvalidArgument("Hoeffding radius needs n >= 1, confidence in (0, 1) and positive range");
    }
    return range * std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * n));
}

VerificationResult verify_constraint(const AuxiliaryConstraint& c, const SampleSet& samples, double gamma, int index,
                                     double support_lo, double support_hi) {
    if (samples.rows < 1) {
        throw InvalidArgument("verification needs at least one sample");
    }
    for (int a : c.arcs()) {
        if (a < 0 || a >= samples.cols) {
            throw InvalidArgument("verification samples do not cover the constraint's arcs");
        }
    }
    VerificationResult res;
    res.index = index;
    double range = 1.0;
    double total = 0.0;
    if (c.kind == AuxKind::Probability) {
        res.threshold = c.q_tilde;
        for (int k = 0; k < samples.rows; ++k) {
            const double v = samples.at(k, c.arc);
            total += (v >= c.l && v <= c.u) ? 1.0 : 0.0;
        }
    } else {
        res.threshold = c.rhs;
        double high = 0.0;
        double low = 0.0;
        for (const auto& [a, p] : c.coeffs) {
            high += std::max(p * support_lo, p * support_hi);
            low += std::min(p * support_lo, p * support_hi);
        }
        range = high - low;
        for (int k = 0; k < samples.rows; ++k) {
            for (const auto& [a, p] : c.coeffs) {
                total += p * samples.at(k, a);
            }
        }
    }
    res.statistic = total / samples.rows;
    if (range <= 0.0) {
        res.epsilon = 0.0;
    } else {
        res.epsilon = hoeffding_epsilon(samples.rows, gamma, range);
    }
    if (res.statistic + res.epsilon <= res.threshold) {
        res.verdict = Verdict::Satisfied;
    } else if (res.statistic - res.epsilon > res.threshold) {
        res.verdict = Verdict::Violated;
    } else {
        res.verdict = Verdict::Undetermined;
    }
    return res;
}

ForcedBit force_resolution(const AuxiliaryConstraint& c, std::mt19937_64& rng) {
    if (c.family == AuxFamily::Difference) {
        std::bernoulli_distribution coin(0.5);
        return {coin(rng) ? 1 : 0, Provenance::ForcedCoin};
    }
    return {0, Provenance::ForcedWorstCase};
}

ResolvedResponses resolve_responses(const AuxiliaryList& list, const SampleSet& samples, double gamma,
                                    std::uint64_t coin_seed) {
    std::mt19937_64 rng(coin_seed);
    ResolvedResponses out;
    out.r.bits.resize(list.size());
    for (std::size_t m = 0; m < list.size(); ++m) {
        const VerificationResult res = verify_constraint(list[m], samples, gamma, static_cast<int>(m));
        out.results.push_back(res);
        if (res.verdict == Verdict::Undetermined) {
            const ForcedBit forced = force_resolution(list[m], rng);
            out.r.bits[m] = forced.bit;
            out.provenance.push_back(forced.provenance);
        } else {
            out.r.bits[m] = res.verdict == Verdict::Satisfied ? 1 : 0;
            out.provenance.push_back(Provenance::Verified);
        }
    }
    return out;
}

WalkResult simulate_walk(const MultiStagePolicy& policy, const AuxiliaryList& list,
                         const ResolvedResponses& responses, const Graph& g) {
    const int scenarios = 1 << list.size();
    if (static_cast<int>(policy.y.size()) != scenarios || responses.r.bits.size() != list.size()) {
        throw InvalidArgument("policy and responses must cover every scenario of the list");
    }
    std::vector<int> candidates;
    for (int j = 1; j <= scenarios; ++j) {
        candidates.push_back(j);
    }
    WalkResult walk;
    walk.y.assign(g.num_arcs(), 0);
    int node = g.source();
    walk.visited.push_back(node);
    const int length = static_cast<int>(list.size());
    while (node != g.sink()) {
        for (int m = 0; m < length; ++m) {
            if (list[m].node != node) {
                continue;
            }
            const int bit = responses.r.bits[m];
            std::erase_if(candidates, [&](int j) { return ResponseVector::from_index(j, length).bits[m] != bit; });
        }
        int next_arc = -1;
        for (int j : candidates) {
            int chosen = -1;
            for (int a : g.forward_star(node)) {
                if (policy.y[j - 1][a] != 0) {
                    chosen = a;
                    break;
                }
            }
            if (chosen < 0) {
                throw NonAnticipativityViolation("scenario " + std::to_string(j) + " does not leave node " +
                                                 std::to_string(node));
            }
            if (next_arc >= 0 && chosen != next_arc) {
                throw NonAnticipativityViolation("scenarios disagree on the arc leaving node " + std::to_string(node));
            }
            next_arc = chosen;
        }
        if (next_arc < 0) {
            throw NonAnticipativityViolation("no scenario survives at node " + std::to_string(node));
        }
        walk.y[next_arc] = 1;
        node = g.arc(next_arc).head;
        if (std::find(walk.visited.begin(), walk.visited.end(), node) != walk.visited.end()) {
            throw NonAnticipativityViolation("walk revisits node " + std::to_string(node));
        }
        walk.visited.push_back(node);
    }
    walk.scenario = responses.r.index();
    for (int a = 0; a < g.num_arcs(); ++a) {
        if (walk.y[a] != 0 && policy.y[walk.scenario - 1][a] == 0) {
            throw NonAnticipativityViolation("walked path leaves the identified scenario's path");
        }
    }
    return walk;
}

void write_verification_trace(std::ostream& out, const ResolvedResponses& responses) {
    for (std::size_t m = 0; m < responses.results.size(); ++m) {
        const VerificationResult& res = responses.results[m];
        nlohmann::json line{{"index", res.index},
                            {"statistic", res.statistic},
                            {"epsilon", res.epsilon},
                            {"threshold", res.threshold},
                            {"verdict", to_string(res.verdict)},
                            {"provenance", to_string(responses.provenance[m])},
                            {"bit", responses.r.bits[m]}};
        out << line.dump() << '\n';
    }
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Satisfied:
        return "satisfied";
    case Verdict::Violated:
        return "violated";
    case Verdict::Undetermined:
        return "undetermined";
    }
    return "undetermined";
}

const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::Verified:
        return "verified";
    case Provenance::ForcedWorstCase:
        return "forced_worst_case";
    case Provenance::ForcedCoin:
        return "forced_coin";
    }
    return "verified";
}

} // namespace drspp
