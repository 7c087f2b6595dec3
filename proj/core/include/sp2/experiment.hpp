#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sp2/generator.hpp"
#include "sp2/rta.hpp"

namespace sp2 {

/// Experiment description, read from JSON:
///
///   { "generator": { "rows": 4, "cols": 4, "flows": 8, "flits": [1, 32],
///                    "period": [100, 2000], "deadline_factor": [0.5, 1.0] },
///     "first_seed": 1, "instances": 100, "sporadic_runs": 20,
///     "horizon_periods": 2, "horizon_cap": 1000000, "extra_delay_p": 0.25,
///     "utilization_bin": 0.1 }
///
/// With "flowset": "<file>" the generator is bypassed and the single given
/// flow set is evaluated once. Relative paths resolve against the config
/// file's directory.
struct ExperimentConfig {
    GeneratorParams generator;
    std::optional<std::filesystem::path> flowset_file;
    std::uint64_t first_seed = 1;
    std::size_t instances = 100;
    std::size_t sporadic_runs = 20;
    /// Simulation horizon = min(horizon_cap, horizon_periods * max T).
    Cycles horizon_periods = 2;
    Cycles horizon_cap = 1'000'000;
    double extra_delay_p = 0.25;
    double utilization_bin = 0.1;

    static ExperimentConfig parse(std::string_view json_text, const std::filesystem::path& base_dir = {});
    static ExperimentConfig load(const std::filesystem::path& file);
};

/// Everything measured for one flow set.
struct InstanceReport {
    std::uint64_t seed = 0;
    std::size_t flow_count = 0;
    double max_link_utilization = 0.0;
    AnalysisResult analysis;
    DominanceReport dominance;
    std::size_t rhs_mismatches = 0;
    std::size_t simulation_runs = 0;
    Cycles horizon = 0;
    std::size_t deadline_misses = 0;        ///< over all flows and runs
    std::size_t sufficiency_violations = 0;  ///< analysed-schedulable flows observed above their bound
    std::size_t trace_violations = 0;       ///< check_trace findings
    std::size_t suspension_set_violations = 0;  ///< self-suspending flows outside SS(i)
    std::size_t suspension_time_violations = 0;  ///< per-message suspension above R_j - C^_j
    std::size_t model_invalid_runs = 0;     ///< runs with a backlogged release
    std::vector<std::optional<Cycles>> max_observed_response;  ///< per flow, over all runs

    [[nodiscard]] std::size_t hard_violations() const {
        return dominance.violations.size() + rhs_mismatches + sufficiency_violations + trace_violations +
               suspension_set_violations + suspension_time_violations;
    }
};

struct UtilizationBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t instances = 0;
    std::size_t schedulable_sp2 = 0;
    std::size_t schedulable_baseline = 0;
};

struct ExperimentReport {
    std::vector<InstanceReport> instances;  ///< ordered by seed
    std::vector<UtilizationBin> bins;

    [[nodiscard]] std::size_t hard_violations() const;
    [[nodiscard]] bool ok() const { return hard_violations() == 0; }
};

/// Simulates one flow set under the synchronous pattern plus `sporadic_runs`
/// seeded sporadic patterns and cross-checks every trace against the
/// analysis.
[[nodiscard]] InstanceReport evaluate_instance(const FlowSet& fs, std::uint64_t seed, const ExperimentConfig& cfg);

[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes instances.csv, flows.csv, ratios.csv and summary.txt into dir.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);
void write_summary(std::ostream& os, const ExperimentReport& report);

}  // namespace sp2
