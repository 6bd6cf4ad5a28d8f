#include <qsched/workload.hpp>

namespace qsched {

std::optional<Task> TaskListWorkload::next() {
    if (pos_ >= tasks_.size()) return std::nullopt;
    return std::move(tasks_[pos_++]);
}

GeneratedWorkload::GeneratedWorkload(SimConfig cfg, const Platform& platform, Rng rng)
    : cfg_(std::move(cfg)), platform_(platform), rng_(std::move(rng)) {}

std::optional<Task> GeneratedWorkload::next() {
    if (created_ >= cfg_.simulation.max_tasks_simulated) return std::nullopt;
    const double gap = draw_exponential(rng_, cfg_.simulation.effective_mean_arrival_time());
    last_arrival_ += gap;
    const TaskTypeSpec& spec = draw_task_type(rng_, cfg_);
    return make_task(created_++, spec, last_arrival_, platform_, rng_);
}

Task make_task(TaskId id, const TaskTypeSpec& spec, double arrival, const Platform& platform, Rng& rng) {
    Task task;
    task.id = id;
    task.type_name = spec.name;
    task.arrival_time = arrival;
    task.deadline = spec.deadline;
    task.targets.reserve(spec.mean_service_time.size());
    for (const auto& [server_name, mean] : spec.mean_service_time) {
        auto type = platform.find_type(server_name);
        if (!type) throw ConfigError("task type " + spec.name + " references unknown server type " + server_name);
        ServiceOption option;
        option.server_type = *type;
        option.mean = mean;
        option.actual = draw_service_time(rng, spec, server_name);
        if (spec.power) {
            if (auto p = spec.power->find(server_name); p != spec.power->end()) option.power = p->second;
        }
        task.targets.push_back(option);
    }
    order_targets(task.targets);
    return task;
}

std::unique_ptr<WorkloadSource> generate_arrivals(
    const SimConfig& cfg, const Platform& platform, Rng rng,
    const std::function<void(const std::vector<Task>&)>& on_pregenerated) {
    auto lazy = std::make_unique<GeneratedWorkload>(cfg, platform, std::move(rng));
    if (!cfg.general.pre_gen_arrivals) return lazy;

    std::vector<Task> tasks;
    tasks.reserve(cfg.simulation.max_tasks_simulated);
    while (auto task = lazy->next()) tasks.push_back(std::move(*task));
    if (on_pregenerated) on_pregenerated(tasks);
    return std::make_unique<TaskListWorkload>(std::move(tasks));
}

}  // namespace qsched
