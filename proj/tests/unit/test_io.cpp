#include <doctest.h>

#include "drspp/errors.hpp"
#include "drspp/io.hpp"

#include <cstdio>
#include <filesystem>

using namespace drspp;
using nlohmann::json;

namespace {

void check_same_instance(const Instance& a, const Instance& b) {
    CHECK(to_json(a.config) == to_json(b.config));
    CHECK(a.effective_seed == b.effective_seed);
    CHECK(a.regenerations == b.regenerations);
    CHECK(to_json(a.graph) == to_json(b.graph));
    CHECK(a.train.data == b.train.data);
    CHECK(a.verify.data == b.verify.data);
    CHECK(a.sensors == b.sensors);
    REQUIRE(a.ambiguity.rows.size() == b.ambiguity.rows.size());
    for (std::size_t k = 0; k < a.ambiguity.rows.size(); ++k) {
        CHECK(a.ambiguity.rows[k].coeffs == b.ambiguity.rows[k].coeffs);
        CHECK(a.ambiguity.rows[k].rhs == b.ambiguity.rows[k].rhs);
        CHECK(a.ambiguity.rows[k].sense == b.ambiguity.rows[k].sense);
    }
    REQUIRE(a.auxiliary.size() == b.auxiliary.size());
    for (std::size_t k = 0; k < a.auxiliary.size(); ++k) {
        CHECK(a.auxiliary[k].node == b.auxiliary[k].node);
        CHECK(a.auxiliary[k].kind == b.auxiliary[k].kind);
        CHECK(a.auxiliary[k].family == b.auxiliary[k].family);
        CHECK(a.auxiliary[k].coeffs == b.auxiliary[k].coeffs);
        CHECK(a.auxiliary[k].rhs == b.auxiliary[k].rhs);
    }
    REQUIRE(a.nominal.marginals.size() == b.nominal.marginals.size());
    for (std::size_t k = 0; k < a.nominal.marginals.size(); ++k) {
        CHECK(a.nominal.marginals[k].alpha == b.nominal.marginals[k].alpha);
        CHECK(a.nominal.marginals[k].beta == b.nominal.marginals[k].beta);
    }
    CHECK(a.nominal.representative == b.nominal.representative);
}

} // namespace

TEST_CASE("instances survive a round trip") {
    for (GraphClass cls : {GraphClass::Acyclic, GraphClass::General}) {
        InstanceConfig c;
        c.h = 2;
        c.r = 2;
        c.graph = cls;
        c.num_aux = 2;
        c.seed = 17;
        const Instance inst = generate_instance(c);
        const json doc = to_json(inst);
        CHECK(doc.at("format") == 1);
        const Instance back = instance_from_json(json::parse(doc.dump()));
        check_same_instance(inst, back);
        CHECK(to_json(back).dump() == doc.dump());
    }
    InstanceConfig p;
    p.h = 2;
    p.r = 2;
    p.aux_mode = AuxMode::Probability;
    p.q_tilde = 0.3;
    const Instance prob = generate_instance(p);
    check_same_instance(prob, instance_from_json(to_json(prob)));

    const Instance ex = example1_instance();
    const Instance ex_back = instance_from_json(to_json(ex));
    check_same_instance(ex, ex_back);
    REQUIRE(ex_back.ambiguity.per_arc.size() == ex.ambiguity.per_arc.size());
    for (std::size_t a = 0; a < ex.ambiguity.per_arc.size(); ++a) {
        REQUIRE(ex_back.ambiguity.per_arc[a].size() == ex.ambiguity.per_arc[a].size());
        for (std::size_t k = 0; k < ex.ambiguity.per_arc[a].size(); ++k) {
            CHECK(ex_back.ambiguity.per_arc[a][k].q_lo == ex.ambiguity.per_arc[a][k].q_lo);
            CHECK(ex_back.ambiguity.per_arc[a][k].l == ex.ambiguity.per_arc[a][k].l);
        }
    }
}

TEST_CASE("files round trip") {
    const std::string path = (std::filesystem::temp_directory_path() / "drspp_io_test.json").string();
    const Instance ex = example1_instance();
    write_json_file(path, to_json(ex));
    CHECK(read_json_file(path) == to_json(ex));
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_json_file(path), FormatError);
}

TEST_CASE("malformed instance documents") {
    const json good = to_json(example1_instance());
    json missing = good;
    missing.erase("format");
    CHECK_THROWS_AS(instance_from_json(missing), FormatError);
    json future = good;
    future["format"] = 2;
    CHECK_THROWS_AS(instance_from_json(future), FormatError);
    json no_graph = good;
    no_graph.erase("graph");
    CHECK_THROWS_AS(instance_from_json(no_graph), FormatError);
    json bad_arc = good;
    bad_arc["graph"]["arcs"].push_back({3, 3});
    CHECK_THROWS_AS(instance_from_json(bad_arc), FormatError);
    json bad_kind = good;
    bad_kind["auxiliary"][0]["kind"] = "median";
    CHECK_THROWS_AS(instance_from_json(bad_kind), FormatError);
}

TEST_CASE("configs and enum names") {
    InstanceConfig c;
    c.h = 4;
    c.graph = GraphClass::General;
    c.aux_mode = AuxMode::Probability;
    c.kappa = 0.25;
    c.seed = 1ULL << 62;
    const InstanceConfig back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.seed == c.seed);
    // missing keys fall back to the defaults
    const InstanceConfig partial = config_from_json(json{{"r", 5}}, c);
    CHECK(partial.r == 5);
    CHECK(partial.h == 4);
    CHECK(graph_class_from_string(to_string(GraphClass::General)) == GraphClass::General);
    CHECK(aux_mode_from_string(to_string(AuxMode::Expectation)) == AuxMode::Expectation);
    CHECK_THROWS_AS(graph_class_from_string("tree"), FormatError);
    CHECK_THROWS_AS(aux_mode_from_string("both"), FormatError);
}

TEST_CASE("policies round trip") {
    const Example1 ex = build_example1();
    const Polyhedron s0 = build_S0(ex.ambiguity);
    const MultiStagePolicy policy =
        solve_multistage(ex.graph, build_partitions(s0, ex.ambiguity, ex.auxiliary), ex.auxiliary);
    const json doc = to_json(ex.graph, policy);
    const MultiStagePolicy back = policy_from_json(doc, ex.graph);
    CHECK(back.y == policy.y);
    CHECK(back.objective == policy.objective);
    CHECK(back.mode == policy.mode);

    json bad = doc;
    bad["scenarios"][0]["arcs"].push_back({1, 8});
    CHECK_THROWS_AS(policy_from_json(bad, ex.graph), FormatError);
    bad = doc;
    bad["scenarios"][0]["index"] = 7;
    CHECK_THROWS_AS(policy_from_json(bad, ex.graph), FormatError);
    bad = doc;
    bad["format"] = 0;
    CHECK_THROWS_AS(policy_from_json(bad, ex.graph), FormatError);
}
