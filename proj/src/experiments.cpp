#include "drspp/experiments.hpp"

#include "drspp/errors.hpp"
#include "drspp/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace drspp {

using nlohmann::json;

namespace {

constexpr double kDenominatorFloor = 1e-9;

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t instance_seed(std::uint64_t seed, int family, int rep) {
    return mix(mix(seed ^ mix(static_cast<std::uint64_t>(family) + 1)) + static_cast<std::uint64_t>(rep));
}

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<double> number_or_null(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<double>();
}

/// Cell key: configuration without the seed.
std::string cell_key(const InstanceConfig& c) {
    json j = to_json(c);
    j.erase("seed");
    return j.dump();
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : "NA";
}

void apply_axis(InstanceConfig& c, const std::string& name, const json& value) {
    json j = to_json(c);
    if (!j.contains(name) || name == "seed") {
        throw FormatError("unknown grid axis " + name);
    }
    j[name] = value;
    c = config_from_json(j, c);
}

} // namespace

Metrics compute_metrics(double z_static, double z_lower, double z_dynamic, std::optional<double> z_posterior) {
    const double denominator = z_static - z_lower;
    if (!(denominator > kDenominatorFloor)) {
        throw DegenerateDenominator("static and max-min values coincide");
    }
    Metrics m;
    m.z_static = z_static;
    m.z_lower = z_lower;
    m.z_dynamic = z_dynamic;
    m.z_posterior = z_posterior;
    m.rho1 = 100.0 * (z_static - z_dynamic) / denominator;
    if (z_posterior) {
        m.rho2 = 100.0 * (z_dynamic - *z_posterior) / denominator;
    }
    return m;
}

json to_json(const InstanceRecord& r) {
    return json{{"cell", r.cell},
                {"rep", r.rep},
                {"config", to_json(r.config)},
                {"effective_seed", r.effective_seed},
                {"regenerations", r.regenerations},
                {"timeout", r.timeout},
                {"error", r.error},
                {"z_static", r.metrics.z_static},
                {"z_lower", r.metrics.z_lower},
                {"z_dynamic", r.metrics.z_dynamic},
                {"z_posterior", optional_number(r.metrics.z_posterior)},
                {"rho1", r.metrics.rho1},
                {"rho2", optional_number(r.metrics.rho2)},
                {"status", r.status},
                {"nodes", r.nodes},
                {"scenario", r.scenario},
                {"bits", r.bits},
                {"provenance", r.provenance},
                {"mode", r.mode},
                {"time_static_s", r.time_static_s},
                {"time_lower_s", r.time_lower_s},
                {"time_dynamic_s", r.time_dynamic_s},
                {"time_posterior_s", r.time_posterior_s}};
}

InstanceRecord record_from_json(const json& j) {
    try {
        InstanceRecord r;
        r.cell = j.at("cell").get<int>();
        r.rep = j.at("rep").get<int>();
        r.config = config_from_json(j.at("config"));
        r.effective_seed = j.at("effective_seed").get<std::uint64_t>();
        r.regenerations = j.at("regenerations").get<int>();
        r.timeout = j.at("timeout").get<bool>();
        r.error = j.at("error").get<std::string>();
        r.metrics.z_static = j.at("z_static").get<double>();
        r.metrics.z_lower = j.at("z_lower").get<double>();
        r.metrics.z_dynamic = j.at("z_dynamic").get<double>();
        r.metrics.z_posterior = number_or_null(j, "z_posterior");
        r.metrics.rho1 = j.at("rho1").get<double>();
        r.metrics.rho2 = number_or_null(j, "rho2");
        r.status = j.at("status").get<std::string>();
        r.nodes = j.at("nodes").get<long>();
        r.scenario = j.at("scenario").get<int>();
        r.bits = j.at("bits").get<std::vector<int>>();
        r.provenance = j.at("provenance").get<std::vector<std::string>>();
        r.mode = j.at("mode").get<std::string>();
        r.time_static_s = j.at("time_static_s").get<double>();
        r.time_lower_s = j.at("time_lower_s").get<double>();
        r.time_dynamic_s = j.at("time_dynamic_s").get<double>();
        r.time_posterior_s = j.at("time_posterior_s").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed instance record: ") + e.what());
    }
}

double mean_absolute_deviation(const std::vector<double>& values) {
    if (values.empty()) {
        return 0.0;
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double mad = 0.0;
    for (double v : values) {
        mad += std::abs(v - mean);
    }
    return mad / static_cast<double>(values.size());
}

std::vector<AggregateRow> aggregate(const std::vector<InstanceRecord>& records) {
    struct Group {
        InstanceConfig config;
        std::vector<double> rho1;
        std::vector<double> rho2;
        std::vector<double> time;
        int timeouts = 0;
        int failures = 0;
    };
    std::vector<Group> groups;
    std::map<std::string, std::size_t> index;
    for (const InstanceRecord& r : records) {
        const std::string key = cell_key(r.config);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            groups.push_back(Group{r.config, {}, {}, {}, 0, 0});
        }
        Group& g = groups[it->second];
        if (!r.error.empty()) {
            ++g.failures;
            continue;
        }
        if (r.timeout) {
            ++g.timeouts;
            continue;
        }
        g.rho1.push_back(r.metrics.rho1);
        if (r.metrics.rho2) {
            g.rho2.push_back(*r.metrics.rho2);
        }
        g.time.push_back(r.time_dynamic_s);
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    std::vector<AggregateRow> rows;
    for (const Group& g : groups) {
        AggregateRow row;
        row.config = g.config;
        row.config.seed = 0;
        row.mean_rho1 = mean(g.rho1);
        row.mad_rho1 = mean_absolute_deviation(g.rho1);
        if (!g.rho2.empty()) {
            row.mean_rho2 = mean(g.rho2);
            row.mad_rho2 = mean_absolute_deviation(g.rho2);
        }
        row.mean_time_s = mean(g.time);
        row.mad_time_s = mean_absolute_deviation(g.time);
        row.n_instances = static_cast<int>(g.rho1.size());
        row.n_timeouts = g.timeouts;
        row.n_failures = g.failures;
        rows.push_back(row);
    }
    return rows;
}

std::vector<InstanceConfig> Grid::cells() const {
    std::vector<InstanceConfig> out{base};
    for (const auto& [name, values] : axes) {
        if (values.empty()) {
            throw FormatError("grid axis " + name + " has no values");
        }
        std::vector<InstanceConfig> next;
        for (const InstanceConfig& c : out) {
            for (const json& v : values) {
                InstanceConfig e = c;
                apply_axis(e, name, v);
                next.push_back(e);
            }
        }
        out = std::move(next);
    }
    for (const InstanceConfig& c : out) {
        c.validate();
    }
    return out;
}

Grid grid_from_json(const json& j) {
    try {
        Grid grid;
        if (j.contains("base")) {
            grid.base = config_from_json(j.at("base"));
        }
        for (const json& axis : j.value("axes", json::array())) {
            if (!axis.is_array() || axis.size() != 2 || !axis.at(1).is_array()) {
                throw FormatError("grid axes are [name, [values...]] pairs");
            }
            grid.axes.push_back({axis.at(0).get<std::string>(), axis.at(1).get<std::vector<json>>()});
        }
        grid.nested = j.value("nested", true);
        grid.time_limit_s = j.value("time_limit_s", 120.0);
        const std::string mode = j.value("nonanticipativity", "auto");
        if (mode == "auto") {
            grid.mode = NonAnticipativityMode::Auto;
        } else if (mode == "general") {
            grid.mode = NonAnticipativityMode::General;
        } else if (mode == "acyclic") {
            grid.mode = NonAnticipativityMode::Acyclic;
        } else {
            throw FormatError("unknown nonanticipativity mode " + mode);
        }
        if (!(grid.time_limit_s > 0.0)) {
            throw FormatError("time_limit_s must be positive");
        }
        (void)grid.cells();
        return grid;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed grid: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid grid: ") + e.what());
    }
}

json to_json(const Grid& grid) {
    json axes = json::array();
    for (const auto& [name, values] : grid.axes) {
        axes.push_back({name, values});
    }
    return json{{"base", to_json(grid.base)},
                {"axes", std::move(axes)},
                {"nested", grid.nested},
                {"time_limit_s", grid.time_limit_s},
                {"nonanticipativity", to_string(grid.mode)}};
}

int default_workers() {
    if (const char* env = std::getenv("DRSPP_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<int>(v);
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<InstanceRecord> evaluate_instance(const Instance& inst, const std::vector<int>& lengths,
                                              double time_limit_s, NonAnticipativityMode mode, bool record_times) {
    const Graph& g = inst.graph;
    const Polyhedron s0 = build_S0(inst.ambiguity);
    MipLimits limits;
    limits.time_seconds = time_limit_s;

    InstanceRecord base;
    base.config = inst.config;
    base.effective_seed = inst.effective_seed;
    base.regenerations = inst.regenerations;

    Stopwatch clock_static;
    const StaticSolution st = solve_static(g, s0, limits);
    base.time_static_s = clock_static.seconds();
    Stopwatch clock_lower;
    const double z_lower = solve_maxmin(g, s0);
    base.time_lower_s = clock_lower.seconds();

    std::vector<InstanceRecord> out;
    for (int length : lengths) {
        InstanceRecord rec = base;
        rec.config.num_aux = length;
        rec.metrics.z_static = st.outcome.objective;
        rec.metrics.z_lower = z_lower;
        if (st.outcome.status != MipStatus::Optimal) {
            rec.timeout = true;
            rec.status = std::string("static_") + to_string(st.outcome.status);
            out.push_back(rec);
            continue;
        }
        if (length > static_cast<int>(inst.auxiliary.size())) {
            throw InvalidArgument("instance has fewer auxiliary constraints than requested");
        }
        const AuxiliaryList list(inst.auxiliary.begin(), inst.auxiliary.begin() + length);
        const std::vector<Polyhedron> parts = build_partitions(s0, inst.ambiguity, list);

        Stopwatch clock_dynamic;
        const MultiStagePolicy policy = solve_multistage(g, parts, list, mode, limits);
        rec.time_dynamic_s = clock_dynamic.seconds();
        rec.status = to_string(policy.outcome.status);
        rec.nodes = policy.outcome.nodes;
        rec.mode = to_string(policy.mode);
        if (policy.outcome.status != MipStatus::Optimal) {
            rec.timeout = true;
            rec.metrics.z_dynamic = policy.outcome.has_incumbent ? policy.objective : 0.0;
            out.push_back(rec);
            continue;
        }

        const ResolvedResponses resolved =
            resolve_responses(list, inst.verify, inst.config.gamma, derive_seed(inst.effective_seed, Stream::Coins));
        const WalkResult walk = simulate_walk(policy, list, resolved, g);
        rec.scenario = walk.scenario;
        rec.bits = resolved.r.bits;
        for (Provenance p : resolved.provenance) {
            rec.provenance.emplace_back(to_string(p));
        }

        std::optional<double> posterior;
        Stopwatch clock_posterior;
        try {
            posterior = solve_posterior(g, walk.y, parts[walk.scenario - 1]);
        } catch (const PosteriorInfeasible&) {
            posterior.reset();
        }
        rec.time_posterior_s = clock_posterior.seconds();
        rec.metrics = compute_metrics(st.outcome.objective, z_lower, policy.objective, posterior);
        out.push_back(rec);
    }
    if (!record_times) {
        for (InstanceRecord& r : out) {
            r.time_static_s = r.time_lower_s = r.time_dynamic_s = r.time_posterior_s = 0.0;
        }
    }
    return out;
}

ExperimentResult run_experiment(const Grid& grid, int reps, std::uint64_t seed, const RunOptions& options) {
    if (reps < 1) {
        throw InvalidArgument("replications must be positive");
    }
    const std::vector<InstanceConfig> cells = grid.cells();
    if (cells.empty()) {
        throw InvalidArgument("grid has no cells");
    }

    // A family is a set of cells sharing instances: all list lengths of one configuration when
    // nested, a single cell otherwise.
    struct Family {
        InstanceConfig config;
        std::vector<int> cells;
        std::vector<int> lengths;
    };
    std::vector<Family> families;
    std::map<std::string, std::size_t> by_key;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        InstanceConfig key_config = cells[c];
        key_config.num_aux = 0;
        const std::string key = grid.nested ? cell_key(key_config) : std::to_string(c);
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            it = by_key.emplace(key, families.size()).first;
            families.push_back(Family{cells[c], {}, {}});
        }
        Family& f = families[it->second];
        f.cells.push_back(static_cast<int>(c));
        f.lengths.push_back(cells[c].num_aux);
    }
    for (Family& f : families) {
        std::vector<std::size_t> order(f.cells.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            order[k] = k;
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return f.lengths[a] < f.lengths[b]; });
        std::vector<int> cells_sorted;
        std::vector<int> lengths_sorted;
        for (std::size_t k : order) {
            cells_sorted.push_back(f.cells[k]);
            lengths_sorted.push_back(f.lengths[k]);
        }
        f.cells = std::move(cells_sorted);
        f.lengths = std::move(lengths_sorted);
        f.config.num_aux = f.lengths.back();
    }

    struct Task {
        int family = 0;
        int rep = 0;
    };
    std::vector<Task> tasks;
    for (std::size_t f = 0; f < families.size(); ++f) {
        for (int r = 0; r < reps; ++r) {
            tasks.push_back({static_cast<int>(f), r});
        }
    }
    std::vector<std::vector<InstanceRecord>> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) {
                return;
            }
            const Family& f = families[tasks[t].family];
            InstanceConfig config = f.config;
            config.seed = instance_seed(seed, tasks[t].family, tasks[t].rep);
            std::vector<InstanceRecord> recs;
            try {
                const Instance inst = generate_instance(config);
                recs = evaluate_instance(inst, f.lengths, grid.time_limit_s, grid.mode, options.record_times);
            } catch (const Error& e) {
                recs.clear();
                for (int length : f.lengths) {
                    InstanceRecord r;
                    r.config = config;
                    r.config.num_aux = length;
                    r.error = e.what();
                    r.status = "error";
                    recs.push_back(r);
                }
            }
            for (std::size_t k = 0; k < recs.size(); ++k) {
                recs[k].cell = f.cells[k];
                recs[k].rep = tasks[t].rep;
            }
            if (options.progress) {
                const std::lock_guard<std::mutex> lock(progress_mutex);
                for (const InstanceRecord& r : recs) {
                    options.progress(r);
                }
            }
            results[t] = std::move(recs);
        }
    };
    const int workers = std::max(1, std::min<int>(options.workers > 0 ? options.workers : default_workers(),
                                                  static_cast<int>(tasks.size())));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (std::thread& th : pool) {
            th.join();
        }
    }

    ExperimentResult out;
    for (auto& recs : results) {
        for (InstanceRecord& r : recs) {
            out.records.push_back(std::move(r));
        }
    }
    std::stable_sort(out.records.begin(), out.records.end(), [](const InstanceRecord& a, const InstanceRecord& b) {
        return a.cell != b.cell ? a.cell < b.cell : a.rep < b.rep;
    });
    out.rows = aggregate(out.records);
    return out;
}

void write_csv(std::ostream& out, const std::vector<AggregateRow>& rows, const json& echo) {
    out << "# drspp experiment " << echo.dump() << '\n';
    out << "# mad = mean absolute deviation about the mean; rho in percent; time = multi-stage MIP seconds; "
           "timed-out and failed instances are excluded from means\n";
    out << "h,r,graph,kappa,n_train,n_verify,eta,gamma,sigma,aux_mode,q_tilde,num_aux,"
           "mean_rho1,mad_rho1,mean_rho2,mad_rho2,mean_time_s,mad_time_s,n_instances,n_timeouts\n";
    for (const AggregateRow& row : rows) {
        const InstanceConfig& c = row.config;
        out << c.h << ',' << c.r << ',' << to_string(c.graph) << ',' << format_number(c.kappa) << ',' << c.n_train
            << ',' << c.n_verify << ',' << format_number(c.eta) << ',' << format_number(c.gamma) << ','
            << format_number(c.sigma) << ',' << to_string(c.aux_mode) << ',' << format_number(c.q_tilde) << ','
            << c.num_aux << ',' << format_number(row.mean_rho1) << ',' << format_number(row.mad_rho1) << ','
            << format_optional(row.mean_rho2) << ',' << format_optional(row.mad_rho2) << ','
            << format_number(row.mean_time_s) << ',' << format_number(row.mad_time_s) << ',' << row.n_instances
            << ',' << row.n_timeouts << '\n';
    }
}

void write_records(std::ostream& out, const std::vector<InstanceRecord>& records) {
    for (const InstanceRecord& r : records) {
        out << to_json(r).dump() << '\n';
    }
}

std::vector<InstanceRecord> read_records(std::istream& in) {
    std::vector<InstanceRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw FormatError(std::string("malformed record line: ") + e.what());
        }
    }
    return out;
}

} // namespace drspp
