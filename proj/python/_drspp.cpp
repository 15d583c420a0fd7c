// Thin binding over the C++ library. Structured data crosses the boundary as JSON text; the
// Python package decodes it.

#include "drspp/datagen.hpp"
#include "drspp/errors.hpp"
#include "drspp/experiments.hpp"
#include "drspp/formulations.hpp"
#include "drspp/io.hpp"
#include "drspp/verification.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace drspp;
using nlohmann::json;

namespace {

std::string generate(const std::string& config) {
    return to_json(generate_instance(config_from_json(json::parse(config)))).dump();
}

std::string solve(const std::string& instance, const std::string& mode, std::optional<int> num_aux,
                  std::optional<double> time_limit, bool force_general) {
    const Instance inst = instance_from_json(json::parse(instance));
    const Polyhedron s0 = build_S0(inst.ambiguity);
    MipLimits limits;
    if (time_limit) {
        limits.time_seconds = *time_limit;
    }
    if (mode == "static") {
        const StaticSolution st = solve_static(inst.graph, s0, limits);
        MultiStagePolicy wrapped;
        wrapped.outcome = st.outcome;
        wrapped.objective = st.outcome.objective;
        wrapped.y = {st.y};
        return to_json(inst.graph, wrapped).dump();
    }
    if (mode == "maxmin") {
        return json{{"z_lower", solve_maxmin(inst.graph, s0)}}.dump();
    }
    if (mode != "dynamic") {
        throw InvalidArgument("mode must be static, maxmin or dynamic");
    }
    const int k = num_aux.value_or(static_cast<int>(inst.auxiliary.size()));
    if (k < 0 || k > static_cast<int>(inst.auxiliary.size())) {
        throw InvalidArgument("num_aux exceeds the instance's auxiliary list");
    }
    const AuxiliaryList list(inst.auxiliary.begin(), inst.auxiliary.begin() + k);
    const MultiStagePolicy p =
        solve_multistage(inst.graph, build_partitions(s0, inst.ambiguity, list), list,
                         force_general ? NonAnticipativityMode::General : NonAnticipativityMode::Auto, limits);
    json out = to_json(inst.graph, p);
    out["num_aux"] = k;
    out["nodes"] = p.outcome.nodes;
    out["bound"] = p.outcome.bound;
    return out.dump();
}

py::tuple experiment(const std::string& grid, int reps, std::uint64_t seed, int workers, bool record_times) {
    RunOptions options;
    options.workers = workers;
    options.record_times = record_times;
    const Grid g = grid_from_json(json::parse(grid));
    ExperimentResult res;
    {
        py::gil_scoped_release release;
        res = run_experiment(g, reps, seed, options);
    }
    std::ostringstream csv;
    write_csv(csv, res.rows, json{{"grid", to_json(g)}, {"reps", reps}, {"seed", seed}});
    std::ostringstream records;
    write_records(records, res.records);
    return py::make_tuple(csv.str(), records.str());
}

} // namespace

PYBIND11_MODULE(_drspp, m) {
    m.doc() = "Distributionally robust shortest paths with auxiliary information";

    py::register_exception<Error>(m, "DrsppError", PyExc_RuntimeError);

    m.def("hoeffding_epsilon", &hoeffding_epsilon, py::arg("n"), py::arg("confidence"), py::arg("range") = 1.0);
    m.def("beta_params", &beta_params, py::arg("mean"), py::arg("sigma"));
    m.def("example1_instance", [] { return to_json(example1_instance()).dump(); });
    m.def("generate", &generate, py::arg("config"));
    m.def("solve", &solve, py::arg("instance"), py::arg("mode") = "dynamic", py::arg("num_aux") = py::none(),
          py::arg("time_limit") = py::none(), py::arg("force_general") = false);
    m.def("experiment", &experiment, py::arg("grid"), py::arg("reps"), py::arg("seed"), py::arg("workers") = 0,
          py::arg("record_times") = true);
}
