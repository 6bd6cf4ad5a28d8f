#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <qsched/model.hpp>

namespace qsched {

/// Tasks waiting for a server, oldest first.
using TaskQueue = std::deque<Task>;

/// Take the task at `queue_index` and start it on the server at `server_index`.
struct Assignment {
    std::size_t queue_index = 0;
    std::size_t server_index = 0;

    bool operator==(const Assignment&) const = default;
};

struct PolicyParams {
    /// How many queue positions a non-blocking policy may look at.
    std::size_t scheduling_window = 10;
};

struct LabeledValue {
    std::string label;
    double value = 0.0;

    bool operator==(const LabeledValue&) const = default;
};

/// A scheduling policy.
///
/// The engine calls assign_task_to_server() after every event, repeatedly,
/// until it returns nullopt. An implementation must only pick an idle server
/// whose type the chosen task supports; anything else aborts the run with a
/// PolicyFault. Policies observe the servers through the span handed to
/// init(), which stays valid and current for the whole run.
class SchedulingPolicy {
public:
    virtual ~SchedulingPolicy() = default;

    virtual void init(std::span<const Server> servers, const PolicyParams& params) = 0;
    virtual std::optional<Assignment> assign_task_to_server(double now, const TaskQueue& queue) = 0;
    virtual void remove_task_from_server(double now, const Server& server) = 0;
    virtual std::vector<LabeledValue> output_final_stats(double now) const = 0;
};

using PolicyFactory = std::function<std::unique_ptr<SchedulingPolicy>()>;

/// Name-keyed policy constructors.
class PolicyRegistry {
public:
    /// Throws std::invalid_argument on an empty or already registered name.
    void register_policy(const std::string& name, PolicyFactory factory);

    /// A fresh instance. Throws std::out_of_range for an unknown name.
    std::unique_ptr<SchedulingPolicy> resolve(const std::string& name) const;

    bool contains(const std::string& name) const { return factories_.contains(name); }
    std::vector<std::string> names() const;

private:
    std::map<std::string, PolicyFactory> factories_;
};

/// Registry pre-populated with the built-in policies under their short names
/// ("fastest_available", "v1" .. "v5") and long aliases
/// ("policies.simple_policy_ver1" .. "policies.simple_policy_ver5").
PolicyRegistry make_default_registry();

/// Common plumbing for the built-ins: keeps the server view and counts
/// decisions for output_final_stats().
class BuiltinPolicy : public SchedulingPolicy {
public:
    void init(std::span<const Server> servers, const PolicyParams& params) override;
    std::optional<Assignment> assign_task_to_server(double now, const TaskQueue& queue) final;
    void remove_task_from_server(double now, const Server& server) override;
    std::vector<LabeledValue> output_final_stats(double now) const override;

protected:
    virtual std::optional<Assignment> select(double now, const TaskQueue& queue) = 0;

    std::span<const Server> servers() const { return servers_; }
    const PolicyParams& params() const { return params_; }

    /// First idle server of `type` in id order.
    std::optional<std::size_t> first_idle(ServerTypeId type) const;

    /// Server minimizing remaining busy time plus the task's mean on it.
    /// Ties go to the lower mean, then an idle server over a busy one, then
    /// the lower server index. `projected`
    /// overrides the remaining busy time per server when non-empty.
    std::size_t best_finish_server(const Task& task, double now, std::span<const double> projected = {}) const;

private:
    std::span<const Server> servers_;
    PolicyParams params_;
    std::uint64_t assignments_ = 0;
    std::uint64_t declines_with_work_ = 0;
    std::uint64_t completions_ = 0;
};

/// Queue head only, on its fastest server type only; otherwise waits.
class FastestAvailablePolicy : public BuiltinPolicy {
protected:
    std::optional<Assignment> select(double now, const TaskQueue& queue) override;
};

/// Version 1 of the evaluated suite; same rule as FastestAvailablePolicy.
class PolicyV1 final : public FastestAvailablePolicy {};

/// Queue head only, falling back through its server types in preference order.
class PolicyV2 final : public BuiltinPolicy {
protected:
    std::optional<Assignment> select(double now, const TaskQueue& queue) override;
};

/// Queue head only, on the server with the earliest estimated finish; waits
/// (blocking the queue) when that server is busy.
class PolicyV3 final : public BuiltinPolicy {
protected:
    std::optional<Assignment> select(double now, const TaskQueue& queue) override;
};

/// V3's rule applied to each of the first `scheduling_window` tasks; the
/// first one whose chosen server is idle gets it.
class PolicyV4 final : public BuiltinPolicy {
protected:
    std::optional<Assignment> select(double now, const TaskQueue& queue) override;
};

/// Like V4, but each task's estimate also counts the mean service of the
/// earlier window tasks already projected onto a server. A task is started
/// only on an idle server with nothing projected ahead of it.
class PolicyV5 final : public BuiltinPolicy {
protected:
    std::optional<Assignment> select(double now, const TaskQueue& queue) override;

private:
    std::vector<double> projected_;
};

}  // namespace qsched
