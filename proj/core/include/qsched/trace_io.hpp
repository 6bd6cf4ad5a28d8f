#pragma once

#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <qsched/config.hpp>
#include <qsched/model.hpp>
#include <qsched/workload.hpp>

namespace qsched {

class TraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One line of a task trace:
///
///     {"id":0,"type":"fft","arrival_time":12.5,"service_times":{"gpu":101.2}}
///
/// with optional "deadline" (number) and "power" (server type to number).
struct TraceRecord {
    TaskId id = 0;
    std::string type_name;
    double arrival_time = 0.0;
    std::map<std::string, double> service_times;
    std::optional<double> deadline;
    std::optional<std::map<std::string, double>> power;

    bool operator==(const TraceRecord&) const = default;
};

std::string format_trace_line(const TraceRecord& record);
TraceRecord parse_trace_line(std::string_view line);

/// Parses every non-blank line. Syntax errors carry the line number.
std::vector<TraceRecord> read_trace_records(std::istream& in);
void write_trace_records(std::ostream& out, std::span<const TraceRecord> records);

TraceRecord to_trace_record(const Task& task, const Platform& platform);

/// Turns records into engine tasks. Actual service times come from the
/// record; the policy-visible means come from the configured task type when
/// it lists that server type, otherwise from the record itself.
///
/// Throws TraceError for unsorted arrivals, duplicate ids, unknown server
/// types, non-positive service times, or records without service times.
std::vector<Task> tasks_from_trace(std::span<const TraceRecord> records, const SimConfig& cfg,
                                   const Platform& platform);

/// Realistic-mode source read from `path`.
std::unique_ptr<WorkloadSource> read_trace(const std::string& path, const SimConfig& cfg,
                                           const Platform& platform);

void write_trace(std::span<const Task> tasks, const Platform& platform, const std::string& path);

/// Appends one line per task as the engine creates them.
class TraceWriter {
public:
    TraceWriter(const std::string& path, const Platform& platform);

    void append(const Task& task);
    void flush();

private:
    std::ofstream out_;
    std::string path_;
    const Platform& platform_;
};

}  // namespace qsched
