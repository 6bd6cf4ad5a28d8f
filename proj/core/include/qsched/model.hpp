#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <qsched/config.hpp>
#include <qsched/exact_sum.hpp>

namespace qsched {

/// Raised when a scheduling policy breaks its contract (busy or unsupported
/// server, bad queue index). Always aborts the run.
class PolicyFault : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Index of a server type in the platform's name-sorted type list.
struct ServerTypeId {
    std::uint32_t value = 0;
    auto operator<=>(const ServerTypeId&) const = default;
};

using TaskId = std::uint64_t;

/// One way a task can run: on a given server type, with the mean the
/// policies see and the actual time the engine charges.
struct ServiceOption {
    ServerTypeId server_type;
    double mean = 0.0;
    double actual = 0.0;
    std::optional<double> power;

    bool operator==(const ServiceOption&) const = default;
};

struct ServerRef {
    ServerTypeId type;
    std::uint32_t id = 0;  // unique within its type

    bool operator==(const ServerRef&) const = default;
};

struct Task {
    TaskId id = 0;
    std::string type_name;
    double arrival_time = 0.0;
    /// Preference ordered: ascending mean, ties by server type id.
    std::vector<ServiceOption> targets;
    std::optional<double> deadline;

    std::optional<double> schedule_time;
    std::optional<double> completion_time;
    std::optional<ServerRef> assigned_server;

    const ServiceOption* option_for(ServerTypeId type) const;
    bool supports(ServerTypeId type) const { return option_for(type) != nullptr; }

    bool operator==(const Task&) const = default;
};

/// Sorts `targets` into preference order.
void order_targets(std::vector<ServiceOption>& targets);

struct Server {
    ServerTypeId type;
    std::uint32_t id = 0;
    /// Position in the platform's server list; policies address servers by it.
    std::size_t index = 0;

    std::optional<TaskId> current_task;
    std::optional<double> assign_time;
    std::optional<double> current_mean_estimate;
    ExactSum busy_time_accum;
    std::uint64_t tasks_served = 0;

    bool busy() const { return current_task.has_value(); }
    ServerRef ref() const { return {type, id}; }
};

/// Names of the configured server types and the flat server list built
/// from their counts, grouped by type in name order then by id.
class Platform {
public:
    explicit Platform(const std::map<std::string, std::uint32_t>& server_counts);

    std::span<const std::string> server_types() const { return type_names_; }
    const std::string& type_name(ServerTypeId type) const { return type_names_.at(type.value); }
    std::optional<ServerTypeId> find_type(std::string_view name) const;
    std::uint32_t count(ServerTypeId type) const { return counts_.at(type.value); }

    /// Fresh, idle servers.
    std::vector<Server> make_servers() const;

private:
    std::vector<std::string> type_names_;
    std::vector<std::uint32_t> counts_;
};

/// Monotone simulated time. Time is unitless.
class SimClock {
public:
    double now() const { return now_; }
    /// Throws std::logic_error if `t` lies in the past.
    void advance_to(double t);

private:
    double now_ = 0.0;
};

/// Estimated time until `server` frees up, computed from the mean service
/// time of its current task, never from the actual draw. Zero when idle or
/// overrunning.
double remaining_busy_time(const Server& server, double now);

/// Places `task` on `server` and returns the completion time the engine must
/// schedule. Throws PolicyFault if the server is busy or cannot run the task.
double assign_task(Server& server, Task& task, double now);

/// Frees `server` at `now`, charging the task's actual service time to its
/// busy accumulator.
void release_server(Server& server, Task& task, double now);

}  // namespace qsched
