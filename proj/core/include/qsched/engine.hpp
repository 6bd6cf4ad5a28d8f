#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <qsched/config.hpp>
#include <qsched/model.hpp>
#include <qsched/policy.hpp>
#include <qsched/stats.hpp>
#include <qsched/workload.hpp>

namespace qsched {

/// Runtime failures other than policy faults (queue overflow, out of order
/// workload).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EventKind : std::uint8_t {
    Completion = 0,  // ordered before arrivals at equal time
    Arrival = 1,
};

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::Arrival;
    std::uint64_t seq = 0;
    /// Server index for completions.
    std::size_t server = 0;
};

/// Strict weak order on (time, kind, seq); true when `a` fires first.
bool fires_before(const Event& a, const Event& b);

/// Optional observation points, mostly for tests and tooling.
struct EngineHooks {
    std::function<void(const Task&)> on_task_created;
    std::function<void(double now, const Task&, const Server&)> on_assignment;
    /// After an event and the scheduling pass that follows it.
    std::function<void(double now, const TaskQueue&, std::span<const Server>)> after_event;
};

struct EngineOptions {
    bool keep_task_records = false;
    EngineHooks hooks;
};

struct RunResult {
    StatsReport report;
    /// In completion order; filled only with keep_task_records.
    std::vector<TaskRecord> records;
};

/// Runs one simulation to completion.
///
/// Pulls tasks from `workload` one at a time, keeps a FIFO queue, and after
/// every event asks `policy` for assignments until it declines. Every
/// created task is drained before returning. Throws PolicyFault when the
/// policy breaks its contract and SimulationError when the queue would grow
/// past max_queue_size or the workload goes back in time.
RunResult simulate(const SimConfig& cfg, const Platform& platform, SchedulingPolicy& policy,
                   WorkloadSource& workload, const EngineOptions& options = {});

/// simulate() with a platform built from cfg, returning only the report.
StatsReport run(const SimConfig& cfg, SchedulingPolicy& policy, WorkloadSource& workload);

}  // namespace qsched
