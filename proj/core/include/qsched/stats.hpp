#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <qsched/exact_sum.hpp>
#include <qsched/model.hpp>
#include <qsched/policy.hpp>

namespace qsched {

/// Life cycle of one completed task.
struct TaskRecord {
    TaskId id = 0;
    std::string type_name;
    double arrival_time = 0.0;
    double schedule_time = 0.0;
    double completion_time = 0.0;
    std::string server_type;
    std::uint32_t server_id = 0;
    double waiting = 0.0;
    /// The actual service time charged to the server.
    double computation = 0.0;
    /// waiting + computation.
    double response = 0.0;
    std::optional<bool> deadline_met;
    std::optional<double> energy;

    bool operator==(const TaskRecord&) const = default;
};

/// Requires schedule/completion times and the assigned server to be set.
TaskRecord make_record(const Task& task, const Platform& platform);

/// Running mean and standard deviation (Welford).
class RunningMoments {
public:
    void add(double x);
    std::uint64_t count() const { return n_; }
    std::optional<double> mean() const;
    /// Population standard deviation.
    std::optional<double> stdev() const;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct Moments {
    std::optional<double> mean;
    std::optional<double> stdev;

    bool operator==(const Moments&) const = default;
};

struct TimingSummary {
    std::uint64_t count = 0;
    Moments waiting;
    Moments computation;
    /// The response mean is mean(waiting) + mean(computation).
    Moments response;

    bool operator==(const TimingSummary&) const = default;
};

class TimingAccumulator {
public:
    void add(const TaskRecord& record);
    TimingSummary summary() const;

private:
    RunningMoments waiting_;
    RunningMoments computation_;
    RunningMoments response_;
};

/// Fraction of simulated time spent at each queue length.
class QueueOccupancy {
public:
    /// Charges the interval [from, to) to `length`.
    void accumulate(std::size_t length, double from, double to);

    double time_at(std::size_t length) const;
    std::size_t max_length() const { return by_length_.empty() ? 0 : by_length_.size() - 1; }
    /// Exact sum over all lengths.
    double total_time() const;
    /// Time integral of the queue length.
    double length_time_integral() const;

private:
    std::vector<ExactSum> by_length_;
};

/// Streaming aggregation of task records; optionally keeps them.
class StatsCollector {
public:
    explicit StatsCollector(bool keep_records = false) : keep_records_(keep_records) {}

    void add(TaskRecord record);

    const std::vector<TaskRecord>& records() const { return records_; }
    std::vector<TaskRecord> take_records() { return std::move(records_); }
    std::uint64_t completed() const { return completed_; }
    std::uint64_t deadline_misses() const { return deadline_misses_; }
    double total_computation() const { return computation_.value(); }
    std::optional<double> total_energy() const;
    const TimingAccumulator& overall() const { return overall_; }
    const std::map<std::string, TimingAccumulator>& per_task_type() const { return per_task_type_; }
    const std::map<std::string, TimingAccumulator>& per_server_type() const { return per_server_type_; }

private:
    bool keep_records_;
    std::vector<TaskRecord> records_;
    std::uint64_t completed_ = 0;
    std::uint64_t deadline_misses_ = 0;
    TimingAccumulator overall_;
    std::map<std::string, TimingAccumulator> per_task_type_;
    std::map<std::string, TimingAccumulator> per_server_type_;
    ExactSum computation_;
    ExactSum energy_;
    bool has_energy_ = false;
};

struct ServerStats {
    std::string type;
    std::uint32_t id = 0;
    double busy_time = 0.0;
    double utilization = 0.0;
    std::uint64_t tasks_served = 0;

    bool operator==(const ServerStats&) const = default;
};

struct ServerTypeStats {
    std::string type;
    std::uint32_t count = 0;
    double busy_time = 0.0;
    double utilization = 0.0;
    /// Timing of the tasks that ran on this server type.
    TimingSummary timing;

    bool operator==(const ServerTypeStats&) const = default;
};

struct StatsReport {
    std::string policy;
    std::uint64_t seed = 0;
    std::uint64_t tasks_created = 0;
    std::uint64_t tasks_completed = 0;
    std::uint64_t deadline_misses = 0;
    double total_sim_time = 0.0;
    /// Exact sum of all computation times.
    double total_busy_time = 0.0;
    TimingSummary overall;
    std::map<std::string, TimingSummary> per_task_type;
    std::vector<ServerStats> per_server;
    std::vector<ServerTypeStats> per_server_type;
    /// Queue length to fraction of simulated time.
    std::map<std::uint64_t, double> queue_histogram;
    /// Time-average queue length.
    double mean_queue_length = 0.0;
    /// Time-average number of tasks waiting or running.
    double mean_tasks_in_system = 0.0;
    std::optional<double> total_energy;
    std::vector<LabeledValue> policy_stats;

    bool operator==(const StatsReport&) const = default;
};

/// Aggregates a drained run. `policy`, `seed`, `tasks_created` and
/// `policy_stats` are left for the caller.
StatsReport finalize(const StatsCollector& collector, const QueueOccupancy& occupancy,
                     std::span<const Server> servers, const Platform& platform, double sim_time);

StatsReport finalize(std::span<const TaskRecord> records, const QueueOccupancy& occupancy,
                     std::span<const Server> servers, const Platform& platform, double sim_time);

nlohmann::json report_to_json(const StatsReport& report);
StatsReport report_from_json(const nlohmann::json& doc);

enum class ReportFormat { Json, Csv };

/// Json writes one document to `path`, adding `provenance` under
/// "effective_config" when it is not null. Csv treats `path` as a prefix and
/// writes summary.csv, per_task_type.csv, per_server.csv,
/// per_server_type.csv and queue_histogram.csv. Throws std::runtime_error on
/// I/O failure.
void write_report(const StatsReport& report, ReportFormat format, const std::string& path,
                  const nlohmann::json& provenance = nullptr);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view text);
/// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace qsched
