#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace qsched {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LogLevel { Debug, Info, Warning, Error };

enum class ServiceDistribution { Normal, Exponential };

std::string_view to_string(LogLevel level);
std::string_view to_string(ServiceDistribution dist);
std::optional<LogLevel> parse_log_level(std::string_view text);
std::optional<ServiceDistribution> parse_service_distribution(std::string_view text);

/// The "general" block of a configuration file.
struct GeneralConfig {
    LogLevel logging_level = LogLevel::Info;
    std::uint64_t random_seed = 0;
    std::string working_dir = ".";
    /// Prefix prepended to every output file name.
    std::string basename;
    bool pre_gen_arrivals = false;
    /// Non-empty selects trace replay (realistic mode).
    std::string input_trace_file;
    std::string output_trace_file;

    bool operator==(const GeneralConfig&) const = default;
};

/// Per task type service characteristics, keyed by server type name.
///
/// Server types missing from `mean_service_time` cannot run this task type.
struct TaskTypeSpec {
    std::string name;
    std::map<std::string, double> mean_service_time;
    std::map<std::string, double> stdev_service_time;
    std::optional<std::map<std::string, double>> power;
    std::optional<double> deadline;
    ServiceDistribution service_distribution = ServiceDistribution::Normal;
    /// Relative frequency in the generated task mix.
    double weight = 1.0;

    /// Supported server types, fastest mean first (ties by name).
    std::vector<std::string> preference_order() const;

    bool operator==(const TaskTypeSpec&) const = default;
};

struct SimulationConfig {
    std::string sched_policy_module;
    std::uint64_t max_tasks_simulated = 100000;
    double mean_arrival_time = 50.0;
    double arrival_time_scale = 1.0;
    bool power_mgmt_enabled = false;
    std::uint64_t max_queue_size = 1000000;
    std::uint64_t scheduling_window = 10;
    std::map<std::string, std::uint32_t> servers;
    std::map<std::string, TaskTypeSpec> tasks;

    double effective_mean_arrival_time() const { return mean_arrival_time * arrival_time_scale; }

    bool operator==(const SimulationConfig&) const = default;
};

struct SimConfig {
    GeneralConfig general;
    SimulationConfig simulation;

    bool realistic_mode() const { return !general.input_trace_file.empty(); }

    bool operator==(const SimConfig&) const = default;
};

/// Parses and validates a configuration document.
///
/// Missing optional keys take their defaults. Unknown keys are skipped and,
/// when `warnings` is non-null, reported there by key path. Throws
/// ConfigError on malformed JSON, missing required keys, type mismatches,
/// or any diagnostic produced by validate_config().
SimConfig parse_config(std::string_view json_text, std::vector<std::string>* warnings = nullptr);

/// Reads a file and hands it to parse_config().
SimConfig load_config(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// One message per violated invariant, each starting with the offending key path.
std::vector<std::string> validate_config(const SimConfig& cfg);

nlohmann::json config_to_json(const SimConfig& cfg);
std::string serialize_config(const SimConfig& cfg);

/// Every key path the parser understands; `*` stands for a user-chosen name.
const std::vector<std::string>& known_config_keys();

}  // namespace qsched
