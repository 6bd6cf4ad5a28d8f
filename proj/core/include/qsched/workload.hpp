#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <qsched/config.hpp>
#include <qsched/model.hpp>
#include <qsched/sampling.hpp>

namespace qsched {

/// Supplies tasks to the engine in non-decreasing arrival order.
class WorkloadSource {
public:
    virtual ~WorkloadSource() = default;
    virtual std::optional<Task> next() = 0;
};

/// Replays a fixed task list.
class TaskListWorkload final : public WorkloadSource {
public:
    explicit TaskListWorkload(std::vector<Task> tasks) : tasks_(std::move(tasks)) {}

    std::optional<Task> next() override;

    const std::vector<Task>& tasks() const { return tasks_; }

private:
    std::vector<Task> tasks_;
    std::size_t pos_ = 0;
};

/// Draws tasks on demand from the configured distributions.
///
/// Per task the draw order is fixed: inter-arrival gap, task type, then one
/// service time per supported server type in server-type name order.
class GeneratedWorkload final : public WorkloadSource {
public:
    GeneratedWorkload(SimConfig cfg, const Platform& platform, Rng rng);

    std::optional<Task> next() override;

private:
    SimConfig cfg_;
    const Platform& platform_;
    Rng rng_;
    std::uint64_t created_ = 0;
    double last_arrival_ = 0.0;
};

/// Builds a task of `spec` arriving at `arrival`, drawing its actual service
/// times from `rng`.
Task make_task(TaskId id, const TaskTypeSpec& spec, double arrival, const Platform& platform, Rng& rng);

/// Probabilistic-mode source: cfg.simulation.max_tasks_simulated tasks with
/// exponential gaps of mean mean_arrival_time * arrival_time_scale. With
/// general.pre_gen_arrivals the list is drawn up front (and handed to
/// `on_pregenerated`, if set) before the source is returned; the draws are
/// identical either way.
std::unique_ptr<WorkloadSource> generate_arrivals(
    const SimConfig& cfg, const Platform& platform, Rng rng,
    const std::function<void(const std::vector<Task>&)>& on_pregenerated = {});

}  // namespace qsched
