#include "drspp/io.hpp"

#include "drspp/errors.hpp"

#include <fstream>

namespace drspp {

using nlohmann::json;

namespace {

json coeffs_to_json(const ArcCoefficients& coeffs) {
    json out = json::object();
    for (const auto& [a, v] : coeffs) {
        out[std::to_string(a)] = v;
    }
    return out;
}

ArcCoefficients coeffs_from_json(const json& j) {
    ArcCoefficients out;
    for (const auto& [key, value] : j.items()) {
        out.push_back({std::stoi(key), value.get<double>()});
    }
    std::sort(out.begin(), out.end());
    return out;
}

AuxFamily family_from_string(const std::string& s) {
    if (s == "individual") {
        return AuxFamily::Individual;
    }
    if (s == "difference") {
        return AuxFamily::Difference;
    }
    if (s == "sum") {
        return AuxFamily::Sum;
    }
    if (s == "probability") {
        return AuxFamily::Probability;
    }
    return AuxFamily::Other;
}

json samples_to_json(const SampleSet& s) {
    json rows = json::array();
    for (int k = 0; k < s.rows; ++k) {
        json row = json::array();
        for (int a = 0; a < s.cols; ++a) {
            row.push_back(s.at(k, a));
        }
        rows.push_back(std::move(row));
    }
    return json{{"rows", s.rows}, {"cols", s.cols}, {"seed", s.seed}, {"data", std::move(rows)}};
}

SampleSet samples_from_json(const json& j) {
    SampleSet s;
    s.rows = j.at("rows").get<int>();
    s.cols = j.at("cols").get<int>();
    s.seed = j.value("seed", std::uint64_t{0});
    for (const json& row : j.at("data")) {
        if (static_cast<int>(row.size()) != s.cols) {
            throw FormatError("sample row width differs from cols");
        }
        for (const json& v : row) {
            s.data.push_back(v.get<double>());
        }
    }
    if (static_cast<int>(s.data.size()) != s.rows * s.cols) {
        throw FormatError("sample row count differs from rows");
    }
    return s;
}

} // namespace

GraphClass graph_class_from_string(const std::string& s) {
    if (s == "acyclic") {
        return GraphClass::Acyclic;
    }
    if (s == "general") {
        return GraphClass::General;
    }
    throw FormatError("unknown graph class " + s);
}

AuxMode aux_mode_from_string(const std::string& s) {
    if (s == "expectation") {
        return AuxMode::Expectation;
    }
    if (s == "probability") {
        return AuxMode::Probability;
    }
    throw FormatError("unknown auxiliary mode " + s);
}

const char* to_string(GraphClass c) {
    return c == GraphClass::Acyclic ? "acyclic" : "general";
}

json to_json(const Graph& g) {
    json arcs = json::array();
    for (const Arc& e : g.arcs()) {
        arcs.push_back({e.tail, e.head});
    }
    return json{{"nodes", g.num_nodes()}, {"source", g.source()}, {"sink", g.sink()}, {"arcs", std::move(arcs)}};
}

Graph graph_from_json(const json& j) {
    std::vector<Arc> arcs;
    for (const json& e : j.at("arcs")) {
        arcs.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    }
    return Graph(j.at("nodes").get<int>(), j.at("source").get<int>(), j.at("sink").get<int>(), std::move(arcs));
}

json to_json(const InstanceConfig& c) {
    return json{{"h", c.h},
                {"r", c.r},
                {"graph", to_string(c.graph)},
                {"kappa", c.kappa},
                {"n_train", c.n_train},
                {"n_verify", c.n_verify},
                {"eta", c.eta},
                {"gamma", c.gamma},
                {"sigma", c.sigma},
                {"num_aux", c.num_aux},
                {"aux_mode", to_string(c.aux_mode)},
                {"q_tilde", c.q_tilde},
                {"seed", c.seed}};
}

InstanceConfig config_from_json(const json& j, const InstanceConfig& defaults) {
    InstanceConfig c = defaults;
    c.h = j.value("h", c.h);
    c.r = j.value("r", c.r);
    if (j.contains("graph")) {
        c.graph = graph_class_from_string(j.at("graph").get<std::string>());
    }
    c.kappa = j.value("kappa", c.kappa);
    c.n_train = j.value("n_train", c.n_train);
    c.n_verify = j.value("n_verify", c.n_verify);
    c.eta = j.value("eta", c.eta);
    c.gamma = j.value("gamma", c.gamma);
    c.sigma = j.value("sigma", c.sigma);
    c.num_aux = j.value("num_aux", c.num_aux);
    if (j.contains("aux_mode")) {
        c.aux_mode = aux_mode_from_string(j.at("aux_mode").get<std::string>());
    }
    c.q_tilde = j.value("q_tilde", c.q_tilde);
    c.seed = j.value("seed", c.seed);
    return c;
}

json to_json(const Instance& inst) {
    json prob = json::array();
    for (const auto& list : inst.ambiguity.per_arc) {
        for (const ProbabilityConstraint& c : list) {
            prob.push_back({{"arc", c.arc}, {"l", c.l}, {"u", c.u}, {"q_lo", c.q_lo}, {"q_hi", c.q_hi}});
        }
    }
    json rows = json::array();
    for (const ExpectationRow& row : inst.ambiguity.rows) {
        rows.push_back({{"coeffs", coeffs_to_json(row.coeffs)},
                        {"rhs", row.rhs},
                        {"sense", row.sense == ExpectationSense::Equal ? "eq" : "le"}});
    }
    json aux = json::array();
    for (const AuxiliaryConstraint& c : inst.auxiliary) {
        json e{{"node", c.node}, {"family", to_string(c.family)}};
        if (c.kind == AuxKind::Probability) {
            e["kind"] = "probability";
            e["arc"] = c.arc;
            e["l"] = c.l;
            e["u"] = c.u;
            e["q_tilde"] = c.q_tilde;
        } else {
            e["kind"] = "expectation";
            e["coeffs"] = coeffs_to_json(c.coeffs);
            e["rhs"] = c.rhs;
        }
        aux.push_back(std::move(e));
    }
    json nominal = json::array();
    for (std::size_t a = 0; a < inst.nominal.marginals.size(); ++a) {
        const NominalMarginal& m = inst.nominal.marginals[a];
        nominal.push_back({{"arc", m.arc},
                           {"mean", m.mean},
                           {"stddev", m.stddev},
                           {"alpha", m.alpha},
                           {"beta", m.beta},
                           {"representative", inst.nominal.representative[a]}});
    }
    json doc{{"format", kFormatVersion},
             {"config", to_json(inst.config)},
             {"effective_seed", inst.effective_seed},
             {"regenerations", inst.regenerations},
             {"graph", to_json(inst.graph)},
             {"prob_constraints", std::move(prob)},
             {"expectation_rows", std::move(rows)},
             {"auxiliary", std::move(aux)},
             {"sensors", inst.sensors},
             {"nominal", std::move(nominal)}};
    json samples = json::object();
    if (inst.train.rows > 0) {
        samples["train"] = samples_to_json(inst.train);
    }
    if (inst.verify.rows > 0) {
        samples["verify"] = samples_to_json(inst.verify);
    }
    doc["samples"] = std::move(samples);
    return doc;
}

Instance instance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("format")) {
        throw FormatError("instance document lacks a format version");
    }
    if (j.at("format").get<int>() != kFormatVersion) {
        throw FormatError("unsupported instance format " + j.at("format").dump());
    }
    try {
        Instance inst;
        if (j.contains("config")) {
            inst.config = config_from_json(j.at("config"));
        }
        inst.effective_seed = j.value("effective_seed", inst.config.seed);
        inst.regenerations = j.value("regenerations", 0);
        inst.graph = graph_from_json(j.at("graph"));
        inst.ambiguity.per_arc.assign(inst.graph.num_arcs(), {});
        for (const json& e : j.at("prob_constraints")) {
            ProbabilityConstraint c{e.at("arc").get<int>(), e.at("l").get<double>(), e.at("u").get<double>(),
                                    e.at("q_lo").get<double>(), e.at("q_hi").get<double>()};
            if (c.arc < 0 || c.arc >= inst.graph.num_arcs()) {
                throw FormatError("probability constraint references unknown arc");
            }
            inst.ambiguity.per_arc[c.arc].push_back(c);
        }
        for (const json& e : j.value("expectation_rows", json::array())) {
            const std::string sense = e.value("sense", "le");
            if (sense != "le" && sense != "eq") {
                throw FormatError("expectation row sense must be le or eq");
            }
            inst.ambiguity.rows.push_back(ExpectationRow{coeffs_from_json(e.at("coeffs")), e.at("rhs").get<double>(),
                                                         sense == "eq" ? ExpectationSense::Equal
                                                                       : ExpectationSense::LessEqual});
        }
        inst.ambiguity.validate();
        for (const json& e : j.value("auxiliary", json::array())) {
            AuxiliaryConstraint c;
            c.node = e.at("node").get<int>();
            const std::string kind = e.at("kind").get<std::string>();
            if (kind == "probability") {
                c.kind = AuxKind::Probability;
                c.family = AuxFamily::Probability;
                c.arc = e.at("arc").get<int>();
                c.l = e.value("l", 0.5);
                c.u = e.value("u", 1.0);
                c.q_tilde = e.at("q_tilde").get<double>();
            } else if (kind == "expectation") {
                c.kind = AuxKind::Expectation;
                c.family = family_from_string(e.value("family", "other"));
                c.coeffs = coeffs_from_json(e.at("coeffs"));
                c.rhs = e.at("rhs").get<double>();
            } else {
                throw FormatError("unknown auxiliary kind " + kind);
            }
            c.validate(inst.graph);
            inst.auxiliary.push_back(std::move(c));
        }
        inst.config.num_aux = static_cast<int>(inst.auxiliary.size());
        inst.sensors = j.value("sensors", std::vector<int>{});
        for (const json& e : j.value("nominal", json::array())) {
            inst.nominal.marginals.push_back(NominalMarginal{e.at("arc").get<int>(), e.at("mean").get<double>(),
                                                             e.at("stddev").get<double>(), e.at("alpha").get<double>(),
                                                             e.at("beta").get<double>()});
            inst.nominal.representative.push_back(e.at("representative").get<int>());
        }
        if (j.contains("samples")) {
            const json& s = j.at("samples");
            if (s.contains("train")) {
                inst.train = samples_from_json(s.at("train"));
            }
            if (s.contains("verify")) {
                inst.verify = samples_from_json(s.at("verify"));
            }
        }
        return inst;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed instance: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid instance: ") + e.what());
    }
}

json to_json(const Graph& g, const MultiStagePolicy& policy) {
    json scenarios = json::array();
    for (std::size_t j = 0; j < policy.y.size(); ++j) {
        json arcs = json::array();
        for (int a = 0; a < g.num_arcs(); ++a) {
            if (policy.y[j][a] != 0) {
                arcs.push_back({g.arc(a).tail, g.arc(a).head});
            }
        }
        scenarios.push_back({{"index", j + 1}, {"arcs", std::move(arcs)}, {"path", path_nodes(g, policy.y[j])}});
    }
    return json{{"format", kFormatVersion},
                {"mode", to_string(policy.mode)},
                {"status", to_string(policy.outcome.status)},
                {"objective", policy.objective},
                {"scenarios", std::move(scenarios)}};
}

MultiStagePolicy policy_from_json(const json& j, const Graph& g) {
    if (j.value("format", 0) != kFormatVersion) {
        throw FormatError("unsupported policy format");
    }
    try {
        MultiStagePolicy policy;
        policy.objective = j.value("objective", 0.0);
        const std::string mode = j.value("mode", "acyclic");
        policy.mode = mode == "general" ? NonAnticipativityMode::General : NonAnticipativityMode::Acyclic;
        const json& scenarios = j.at("scenarios");
        policy.y.assign(scenarios.size(), PathIncidence(g.num_arcs(), 0));
        for (const json& s : scenarios) {
            const int index = s.at("index").get<int>();
            if (index < 1 || index > static_cast<int>(scenarios.size())) {
                throw FormatError("policy scenario index out of range");
            }
            for (const json& e : s.at("arcs")) {
                const int a = g.find_arc(e.at(0).get<int>(), e.at(1).get<int>());
                if (a < 0) {
                    throw FormatError("policy references an unknown arc");
                }
                policy.y[index - 1][a] = 1;
            }
        }
        return policy;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed policy: ") + e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("cannot parse " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

Instance example1_instance() {
    Example1 ex = build_example1();
    Instance inst;
    inst.config.num_aux = 1;
    inst.config.seed = 0;
    inst.graph = std::move(ex.graph);
    inst.ambiguity = std::move(ex.ambiguity);
    inst.auxiliary = std::move(ex.auxiliary);
    return inst;
}

} // namespace drspp
