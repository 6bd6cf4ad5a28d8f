#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <qsched/analytic.hpp>
#include <qsched/config.hpp>
#include <qsched/engine.hpp>
#include <qsched/policy.hpp>

namespace qsched {

/// Resolves a relative path against general.working_dir.
std::string resolve_path(const SimConfig& cfg, const std::string& path);

struct RunOptions {
    bool keep_task_records = false;
    EngineHooks hooks;
};

/// One complete run as described by `cfg`: picks the policy from
/// `registry`, builds the workload (trace replay or seeded generator),
/// writes general.output_trace_file when set, and simulates.
RunResult run_simulation(const SimConfig& cfg, const PolicyRegistry& registry, const RunOptions& options = {});

/// Single task type on `k` identical servers with exponential service of
/// mean `mean_service`, arrivals tuned for utilization `rho`, FIFO policy.
SimConfig mmk_config(std::uint32_t k, double rho, std::uint64_t tasks, std::uint64_t seed,
                     double mean_service = 50.0);

struct ValidationPoint {
    std::uint32_t k = 1;
    double rho = 0.0;
    std::uint64_t tasks = 0;
    std::uint64_t seed = 0;
    analytic::ErrorSample sample;
};

/// Simulates mmk_config() and compares the mean waiting time with Erlang C.
ValidationPoint run_mmk_point(std::uint32_t k, double rho, std::uint64_t tasks, std::uint64_t seed,
                              double mean_service = 50.0);

void write_validation_csv(const std::vector<ValidationPoint>& points, const std::string& path);

enum class SweepParam { MeanArrivalTime, ArrivalTimeScale, StdevFactor, Policy };

std::optional<SweepParam> parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam param);
/// Accepted spellings of the sweep parameter, as typed on the command line.
const std::vector<std::string>& sweep_param_names();

/// Sets one swept value. StdevFactor rewrites every configured stdev to
/// factor * mean. Throws ConfigError on a malformed or out of range value.
void apply_sweep_value(SimConfig& cfg, SweepParam param, const std::string& value);

/// Seed for sweep point `index`: base + index, so point 0 reproduces a plain run.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct SweepRow {
    std::string value;
    std::string policy;
    std::uint64_t seed = 0;
    StatsReport report;
};

/// One run per value, crossed with `policies` when non-empty. All policies
/// at a given value share that value's seed, so they see the same workload.
std::vector<SweepRow> run_sweep(const SimConfig& base, SweepParam param, const std::vector<std::string>& values,
                                const std::vector<std::string>& policies, const PolicyRegistry& registry);

/// Summary table: one row per run.
void write_sweep_csv(const std::vector<SweepRow>& rows, SweepParam param, const std::string& path);
/// Long-form queue-size histograms of every run.
void write_sweep_histogram_csv(const std::vector<SweepRow>& rows, SweepParam param, const std::string& path);

/// Fraction of time the queue was empty (0 when never observed).
double queue_empty_fraction(const StatsReport& report);

}  // namespace qsched
