#include <qsched/policy.hpp>

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace qsched {

void PolicyRegistry::register_policy(const std::string& name, PolicyFactory factory) {
    if (name.empty()) throw std::invalid_argument("policy name must not be empty");
    if (!factory) throw std::invalid_argument("policy " + name + " has no constructor");
    if (!factories_.emplace(name, std::move(factory)).second) {
        throw std::invalid_argument("scheduling policy " + name + " is already registered");
    }
}

std::unique_ptr<SchedulingPolicy> PolicyRegistry::resolve(const std::string& name) const {
    auto it = factories_.find(name);
    if (it == factories_.end()) throw std::out_of_range("scheduling policy " + name + " is not registered");
    return it->second();
}

std::vector<std::string> PolicyRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, factory] : factories_) out.push_back(name);
    return out;
}

PolicyRegistry make_default_registry() {
    PolicyRegistry registry;
    registry.register_policy("fastest_available", [] { return std::make_unique<FastestAvailablePolicy>(); });
    const std::vector<PolicyFactory> versions = {
        [] { return std::make_unique<PolicyV1>(); },
        [] { return std::make_unique<PolicyV2>(); },
        [] { return std::make_unique<PolicyV3>(); },
        [] { return std::make_unique<PolicyV4>(); },
        [] { return std::make_unique<PolicyV5>(); },
    };
    for (std::size_t i = 0; i < versions.size(); ++i) {
        const auto n = std::to_string(i + 1);
        registry.register_policy("v" + n, versions[i]);
        registry.register_policy("policies.simple_policy_ver" + n, versions[i]);
    }
    return registry;
}

void BuiltinPolicy::init(std::span<const Server> servers, const PolicyParams& params) {
    servers_ = servers;
    params_ = params;
}

std::optional<Assignment> BuiltinPolicy::assign_task_to_server(double now, const TaskQueue& queue) {
    auto decision = select(now, queue);
    if (decision) {
        ++assignments_;
    } else if (!queue.empty()) {
        ++declines_with_work_;
    }
    return decision;
}

void BuiltinPolicy::remove_task_from_server(double, const Server&) { ++completions_; }

std::vector<LabeledValue> BuiltinPolicy::output_final_stats(double) const {
    return {
        {"assignments", static_cast<double>(assignments_)},
        {"completions", static_cast<double>(completions_)},
        {"declines_with_queued_tasks", static_cast<double>(declines_with_work_)},
    };
}

std::optional<std::size_t> BuiltinPolicy::first_idle(ServerTypeId type) const {
    for (const auto& server : servers_) {
        if (server.type == type && !server.busy()) return server.index;
    }
    return std::nullopt;
}

std::size_t BuiltinPolicy::best_finish_server(const Task& task, double now,
                                              std::span<const double> projected) const {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_finish = std::numeric_limits<double>::infinity();
    double best_mean = std::numeric_limits<double>::infinity();
    bool best_busy = true;
    for (const auto& server : servers_) {
        const ServiceOption* option = task.option_for(server.type);
        if (option == nullptr) continue;
        const double ahead = projected.empty() ? remaining_busy_time(server, now) : projected[server.index];
        const double finish = ahead + option->mean;
        // An overrunning server estimates zero remaining time and would tie
        // with an idle one; the idle one wins. Servers are visited in index
        // order, so strict comparisons keep the lowest index otherwise.
        bool better = finish < best_finish;
        if (finish == best_finish) {
            better = option->mean < best_mean || (option->mean == best_mean && best_busy && !server.busy());
        }
        if (better) {
            best = server.index;
            best_finish = finish;
            best_mean = option->mean;
            best_busy = server.busy();
        }
    }
    return best;
}

std::optional<Assignment> FastestAvailablePolicy::select(double, const TaskQueue& queue) {
    if (queue.empty()) return std::nullopt;
    const Task& head = queue.front();
    if (head.targets.empty()) return std::nullopt;
    if (auto server = first_idle(head.targets.front().server_type)) return Assignment{0, *server};
    return std::nullopt;
}

std::optional<Assignment> PolicyV2::select(double, const TaskQueue& queue) {
    if (queue.empty()) return std::nullopt;
    for (const auto& option : queue.front().targets) {
        if (auto server = first_idle(option.server_type)) return Assignment{0, *server};
    }
    return std::nullopt;
}

std::optional<Assignment> PolicyV3::select(double now, const TaskQueue& queue) {
    if (queue.empty()) return std::nullopt;
    const std::size_t chosen = best_finish_server(queue.front(), now);
    if (chosen >= servers().size() || servers()[chosen].busy()) return std::nullopt;
    return Assignment{0, chosen};
}

std::optional<Assignment> PolicyV4::select(double now, const TaskQueue& queue) {
    const std::size_t window = std::min(queue.size(), params().scheduling_window);
    for (std::size_t i = 0; i < window; ++i) {
        const std::size_t chosen = best_finish_server(queue[i], now);
        if (chosen < servers().size() && !servers()[chosen].busy()) return Assignment{i, chosen};
    }
    return std::nullopt;
}

std::optional<Assignment> PolicyV5::select(double now, const TaskQueue& queue) {
    const std::size_t window = std::min(queue.size(), params().scheduling_window);
    if (window == 0) return std::nullopt;
    projected_.resize(servers().size());
    for (const auto& server : servers()) projected_[server.index] = remaining_busy_time(server, now);
    for (std::size_t i = 0; i < window; ++i) {
        const Task& task = queue[i];
        const std::size_t chosen = best_finish_server(task, now, projected_);
        if (chosen >= servers().size()) continue;
        if (!servers()[chosen].busy() && projected_[chosen] == 0.0) return Assignment{i, chosen};
        projected_[chosen] += task.option_for(servers()[chosen].type)->mean;
    }
    return std::nullopt;
}

}  // namespace qsched
