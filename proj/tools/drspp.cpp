#include "drspp/errors.hpp"
#include "drspp/experiments.hpp"
#include "drspp/io.hpp"
#include "drspp/model.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using nlohmann::json;
using namespace drspp;

namespace {

struct ConfigFlags {
    InstanceConfig config;
    std::string graph = "acyclic";
    std::string aux_mode = "expectation";
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    InstanceConfig& c = f.config;
    cmd->add_option("--layers", c.h, "Number of layers h")->capture_default_str();
    cmd->add_option("--width", c.r, "Nodes per layer r")->capture_default_str();
    cmd->add_option("--graph", f.graph, "acyclic or general")->capture_default_str();
    cmd->add_option("--kappa", c.kappa, "Sensor probability")->capture_default_str();
    cmd->add_option("--n-train", c.n_train, "Training sample size")->capture_default_str();
    cmd->add_option("--n-verify", c.n_verify, "Verification sample size")->capture_default_str();
    cmd->add_option("--eta", c.eta, "Confidence for the budget parameters")->capture_default_str();
    cmd->add_option("--gamma", c.gamma, "Confidence for online verification")->capture_default_str();
    cmd->add_option("--sigma", c.sigma, "Standard deviation of the arc costs")->capture_default_str();
    cmd->add_option("--num-aux", c.num_aux, "Auxiliary list length")->capture_default_str();
    cmd->add_option("--aux-mode", f.aux_mode, "expectation or probability")->capture_default_str();
    cmd->add_option("--q-tilde", c.q_tilde, "Probability level of probability constraints")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Root seed")->capture_default_str();
}

InstanceConfig finish(ConfigFlags& f) {
    f.config.graph = graph_class_from_string(f.graph);
    f.config.aux_mode = aux_mode_from_string(f.aux_mode);
    f.config.validate();
    return f.config;
}

Instance load_instance(const std::string& path) {
    if (path == "example1") {
        return example1_instance();
    }
    return instance_from_json(read_json_file(path));
}

AuxiliaryList prefix(const Instance& inst, int num_aux) {
    const int n = num_aux < 0 ? static_cast<int>(inst.auxiliary.size()) : num_aux;
    if (n > static_cast<int>(inst.auxiliary.size())) {
        throw InvalidArgument("instance has only " + std::to_string(inst.auxiliary.size()) +
                              " auxiliary constraints");
    }
    return {inst.auxiliary.begin(), inst.auxiliary.begin() + n};
}

MipLimits limits_for(double seconds) {
    MipLimits limits;
    if (seconds > 0.0) {
        limits.time_seconds = seconds;
    }
    return limits;
}

void emit(const json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(out, j);
    }
}

void write_lp(const std::string& path, const MixedIntegerProgram& mip) {
    std::ofstream f(path);
    if (!f) {
        throw FormatError("cannot write " + path);
    }
    write_lp_format(f, mip);
}

void write_lp(const std::string& path, const LinearProgram& lp) {
    std::ofstream f(path);
    if (!f) {
        throw FormatError("cannot write " + path);
    }
    write_lp_format(f, lp);
}

/// Verification, walk, posterior and metrics for a solved policy.
json evaluate_policy(const Instance& inst, const MultiStagePolicy& policy, const AuxiliaryList& list,
                     std::optional<std::uint64_t> coin_seed_override, bool trace) {
    const std::uint64_t coin_seed = coin_seed_override ? *coin_seed_override
                                                       : derive_seed(inst.effective_seed, Stream::Coins);
    const ResolvedResponses resolved = resolve_responses(list, inst.verify, inst.config.gamma, coin_seed);
    if (trace) {
        write_verification_trace(std::cerr, resolved);
    }
    const WalkResult walk = simulate_walk(policy, list, resolved, inst.graph);
    const Polyhedron s0 = build_S0(inst.ambiguity);
    const std::vector<Polyhedron> parts = build_partitions(s0, inst.ambiguity, list);

    json verdicts = json::array();
    for (std::size_t k = 0; k < resolved.results.size(); ++k) {
        const VerificationResult& v = resolved.results[k];
        verdicts.push_back({{"index", v.index},
                            {"statistic", v.statistic},
                            {"epsilon", v.epsilon},
                            {"threshold", v.threshold},
                            {"verdict", to_string(v.verdict)},
                            {"provenance", to_string(resolved.provenance[k])},
                            {"bit", resolved.r.bits[k]}});
    }
    json out{{"scenario", walk.scenario}, {"visited", walk.visited}, {"verification", std::move(verdicts)}};
    std::optional<double> posterior;
    try {
        posterior = solve_posterior(inst.graph, walk.y, parts[walk.scenario - 1]);
        out["z_posterior"] = *posterior;
    } catch (const PosteriorInfeasible&) {
        out["z_posterior"] = nullptr;
    }
    const double zs = solve_static(inst.graph, s0).outcome.objective;
    const double zl = solve_maxmin(inst.graph, s0);
    out["z_static"] = zs;
    out["z_lower"] = zl;
    out["z_dynamic"] = policy.objective;
    try {
        const Metrics m = compute_metrics(zs, zl, policy.objective, posterior);
        out["rho1"] = m.rho1;
        out["rho2"] = m.rho2 ? json(*m.rho2) : json(nullptr);
    } catch (const DegenerateDenominator&) {
        out["rho1"] = nullptr;
        out["rho2"] = nullptr;
    }
    return out;
}

int run_example1() {
    const auto start = std::chrono::steady_clock::now();
    const Instance inst = example1_instance();
    const Polyhedron s0 = build_S0(inst.ambiguity);
    const StaticSolution st = solve_static(inst.graph, s0);
    const double zl = solve_maxmin(inst.graph, s0);
    const std::vector<Polyhedron> parts = build_partitions(s0, inst.ambiguity, inst.auxiliary);
    const MultiStagePolicy dyn = solve_multistage(inst.graph, parts, inst.auxiliary);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const bool ok = std::abs(st.outcome.objective - 1.0) <= 1e-6 && std::abs(zl - 0.25) <= 1e-6 &&
                    std::abs(dyn.objective - 0.5) <= 1e-6 && seconds < 1.0;
    std::printf("z_static  = %.9f (expected 1)\n", st.outcome.objective);
    std::printf("z_lower   = %.9f (expected 0.25)\n", zl);
    std::printf("z_dynamic = %.9f (expected 0.5)\n", dyn.objective);
    const Metrics m = compute_metrics(st.outcome.objective, zl, dyn.objective, dyn.objective);
    std::printf("rho1      = %.4f\n", m.rho1);
    std::printf("runtime   = %.4f s\n", seconds);
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust shortest paths with online verification"};
    app.require_subcommand(1);

    ConfigFlags gen_flags;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Generate a random instance");
    add_config_flags(gen, gen_flags);
    gen->add_option("-o,--out", gen_out, "Output file (stdout when omitted)");

    std::string solve_mode = "dynamic";
    std::string solve_instance;
    std::string solve_out;
    std::string solve_lp;
    bool force_general = false;
    int solve_num_aux = -1;
    double solve_time = 0.0;
    auto* solve = app.add_subcommand("solve", "Solve the static, max-min or multi-stage problem");
    solve->add_option("--mode", solve_mode, "static, maxmin or dynamic")
        ->check(CLI::IsMember({"static", "maxmin", "dynamic"}))
        ->capture_default_str();
    solve->add_option("--instance", solve_instance, "Instance JSON, or 'example1'")->required();
    solve->add_flag("--force-general", force_general, "Use ordering-label constraints even on acyclic graphs");
    solve->add_option("--num-aux", solve_num_aux, "Use only the first k auxiliary constraints");
    solve->add_option("--time-limit", solve_time, "MIP time limit in seconds (0 = none)");
    solve->add_option("--lp-out", solve_lp, "Write the model in LP format");
    solve->add_option("-o,--out", solve_out, "Result JSON (stdout when omitted)");

    std::string verify_instance;
    std::string verify_policy;
    std::string verify_out;
    std::optional<std::uint64_t> coin_seed;
    bool verify_trace = false;
    auto* verify = app.add_subcommand("verify", "Verify auxiliary constraints and walk a policy");
    verify->add_option("--instance", verify_instance, "Instance JSON, or 'example1'")->required();
    verify->add_option("--policy", verify_policy, "Policy JSON from solve --mode dynamic")->required();
    verify->add_option("--coin-seed", coin_seed, "Override the seed for forced coin flips");
    verify->add_flag("--trace", verify_trace, "Print the per-constraint trace to stderr as JSON lines");
    verify->add_option("-o,--out", verify_out, "Result JSON (stdout when omitted)");

    std::string grid_path;
    int reps = 20;
    std::uint64_t exp_seed = 1;
    std::string exp_out = "results.csv";
    std::string records_out;
    bool no_times = false;
    int workers = 0;
    bool quiet = false;
    auto* exp = app.add_subcommand("experiment", "Run a replicated experiment grid");
    exp->add_option("--grid", grid_path, "Grid JSON")->required();
    exp->add_option("--reps", reps, "Replications per cell")->capture_default_str();
    exp->add_option("--seed", exp_seed, "Experiment seed")->capture_default_str();
    exp->add_option("--out", exp_out, "Aggregate CSV")->capture_default_str();
    exp->add_option("--records", records_out, "Per-instance JSONL (default: <out>.records.jsonl)");
    exp->add_option("--workers", workers, "Worker threads (default: DRSPP_WORKERS or all cores)");
    exp->add_flag("--no-times", no_times, "Zero all timings so reruns are byte-identical");
    exp->add_flag("-q,--quiet", quiet, "No progress output");

    auto* ex1 = app.add_subcommand("example1", "Solve the built-in introductory example");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const Instance inst = generate_instance(finish(gen_flags));
            emit(to_json(inst), gen_out);
        } else if (*solve) {
            const Instance inst = load_instance(solve_instance);
            const Polyhedron s0 = build_S0(inst.ambiguity);
            const auto start = std::chrono::steady_clock::now();
            json out;
            if (solve_mode == "static") {
                if (!solve_lp.empty()) {
                    write_lp(solve_lp, build_static_mip(inst.graph, s0).mip);
                }
                const StaticSolution st = solve_static(inst.graph, s0, limits_for(solve_time));
                MultiStagePolicy one;
                one.outcome = st.outcome;
                one.objective = st.outcome.objective;
                one.y = {st.y};
                out = to_json(inst.graph, one);
                out["mode"] = "static";
                out["nodes"] = st.outcome.nodes;
            } else if (solve_mode == "maxmin") {
                if (!solve_lp.empty()) {
                    write_lp(solve_lp, build_maxmin_lp(inst.graph, s0).lp);
                }
                out = json{{"format", kFormatVersion}, {"mode", "maxmin"}, {"objective", solve_maxmin(inst.graph, s0)}};
            } else {
                const AuxiliaryList list = prefix(inst, solve_num_aux);
                const std::vector<Polyhedron> parts = build_partitions(s0, inst.ambiguity, list);
                const NonAnticipativityMode mode =
                    force_general ? NonAnticipativityMode::General : NonAnticipativityMode::Auto;
                if (!solve_lp.empty()) {
                    write_lp(solve_lp, build_multistage_mip(inst.graph, parts, list, mode).mip);
                }
                const MultiStagePolicy policy =
                    solve_multistage(inst.graph, parts, list, mode, limits_for(solve_time));
                out = to_json(inst.graph, policy);
                out["num_aux"] = list.size();
                out["nodes"] = policy.outcome.nodes;
                out["bound"] = policy.outcome.bound;
            }
            out["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            emit(out, solve_out);
        } else if (*verify) {
            const Instance inst = load_instance(verify_instance);
            const json pj = read_json_file(verify_policy);
            const MultiStagePolicy policy = policy_from_json(pj, inst.graph);
            const int n = pj.value("num_aux", static_cast<int>(inst.auxiliary.size()));
            const AuxiliaryList list = prefix(inst, n);
            if (policy.y.size() != (std::size_t{1} << list.size())) {
                throw FormatError("policy has " + std::to_string(policy.y.size()) + " scenarios, expected " +
                                  std::to_string(std::size_t{1} << list.size()));
            }
            emit(evaluate_policy(inst, policy, list, coin_seed, verify_trace), verify_out);
        } else if (*exp) {
            const Grid grid = grid_from_json(read_json_file(grid_path));
            RunOptions options;
            options.workers = workers;
            options.record_times = !no_times;
            if (!quiet) {
                options.progress = [](const InstanceRecord& r) {
                    std::fprintf(stderr, "cell %d rep %d |L|=%d %s rho1=%.3f t=%.2fs\n", r.cell, r.rep,
                                 r.config.num_aux, r.error.empty() ? r.status.c_str() : r.error.c_str(),
                                 r.metrics.rho1, r.time_dynamic_s);
                };
            }
            const ExperimentResult result = run_experiment(grid, reps, exp_seed, options);
            const json echo{{"grid", to_json(grid)}, {"reps", reps}, {"seed", exp_seed}};
            std::ofstream csv(exp_out);
            if (!csv) {
                throw FormatError("cannot write " + exp_out);
            }
            write_csv(csv, result.rows, echo);
            const std::string rec_path = records_out.empty() ? exp_out + ".records.jsonl" : records_out;
            std::ofstream rec(rec_path);
            if (!rec) {
                throw FormatError("cannot write " + rec_path);
            }
            write_records(rec, result.records);
        } else if (*ex1) {
            return run_example1();
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
