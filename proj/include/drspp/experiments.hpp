#pragma once

#include "drspp/datagen.hpp"
#include "drspp/formulations.hpp"
#include "drspp/verification.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace drspp {

/// Relative gaps in percent of the static-to-floor gap.
struct Metrics {
    double z_static = 0.0;
    double z_lower = 0.0;
    double z_dynamic = 0.0;
    /// Missing when the identified partition is empty.
    std::optional<double> z_posterior;
    double rho1 = 0.0;
    std::optional<double> rho2;
};

/// Throws DegenerateDenominator when z_static - z_lower <= 1e-9.
Metrics compute_metrics(double z_static, double z_lower, double z_dynamic, std::optional<double> z_posterior);

/// One (instance, list length) evaluation.
struct InstanceRecord {
    int cell = 0;
    int rep = 0;
    InstanceConfig config;
    std::uint64_t effective_seed = 0;
    int regenerations = 0;
    bool timeout = false;
    /// Non-empty when the instance could not be evaluated; such records never enter aggregates.
    std::string error;
    Metrics metrics;
    std::string status;
    long nodes = 0;
    int scenario = 0;
    std::vector<int> bits;
    std::vector<std::string> provenance;
    std::string mode;
    double time_static_s = 0.0;
    double time_lower_s = 0.0;
    double time_dynamic_s = 0.0;
    double time_posterior_s = 0.0;
};

nlohmann::json to_json(const InstanceRecord& r);
InstanceRecord record_from_json(const nlohmann::json& j);

struct AggregateRow {
    /// Cell configuration; seed is not part of the key.
    InstanceConfig config;
    double mean_rho1 = 0.0;
    double mad_rho1 = 0.0;
    std::optional<double> mean_rho2;
    std::optional<double> mad_rho2;
    double mean_time_s = 0.0;
    double mad_time_s = 0.0;
    int n_instances = 0;
    int n_timeouts = 0;
    int n_failures = 0;
};

/// Mean absolute deviation about the mean; zero for an empty sample.
double mean_absolute_deviation(const std::vector<double>& values);

/// Groups records by cell configuration in order of first appearance. Timed-out and failed
/// records are counted but excluded from the statistics.
std::vector<AggregateRow> aggregate(const std::vector<InstanceRecord>& records);

struct Grid {
    InstanceConfig base;
    /// Axis name and values, expanded as a cartesian product in the order given.
    std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;
    /// Cells differing only in num_aux share instances and use prefix lists.
    bool nested = true;
    double time_limit_s = 120.0;
    NonAnticipativityMode mode = NonAnticipativityMode::Auto;

    [[nodiscard]] std::vector<InstanceConfig> cells() const;
};

/// {"base": {...}, "axes": [["num_aux", [1, 2, 3]], ...], "nested": true, "time_limit_s": 120,
///  "nonanticipativity": "auto"}. Throws FormatError.
Grid grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Grid& grid);

struct RunOptions {
    /// Zero reads DRSPP_WORKERS, falling back to the hardware concurrency.
    int workers = 0;
    /// False zeroes every timing field so repeated runs produce identical bytes.
    bool record_times = true;
    std::function<void(const InstanceRecord&)> progress;
};

/// Worker cap from DRSPP_WORKERS, or the hardware concurrency (at least 1).
int default_workers();

/// Solves one instance for the given prefix lengths of its auxiliary list (ascending).
std::vector<InstanceRecord> evaluate_instance(const Instance& inst, const std::vector<int>& lengths,
                                              double time_limit_s, NonAnticipativityMode mode, bool record_times);

struct ExperimentResult {
    std::vector<InstanceRecord> records;
    std::vector<AggregateRow> rows;
};

/// Deterministic under the seed regardless of the worker count.
ExperimentResult run_experiment(const Grid& grid, int reps, std::uint64_t seed, const RunOptions& options = {});

/// CSV with a commented header echoing the run configuration.
void write_csv(std::ostream& out, const std::vector<AggregateRow>& rows, const nlohmann::json& echo);
void write_records(std::ostream& out, const std::vector<InstanceRecord>& records);
std::vector<InstanceRecord> read_records(std::istream& in);

} // namespace drspp
