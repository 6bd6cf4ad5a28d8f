#include <qsched/model.hpp>

#include <algorithm>

namespace qsched {

const ServiceOption* Task::option_for(ServerTypeId type) const {
    for (const auto& option : targets) {
        if (option.server_type == type) return &option;
    }
    return nullptr;
}

void order_targets(std::vector<ServiceOption>& targets) {
    std::sort(targets.begin(), targets.end(), [](const ServiceOption& a, const ServiceOption& b) {
        if (a.mean != b.mean) return a.mean < b.mean;
        return a.server_type < b.server_type;
    });
}

Platform::Platform(const std::map<std::string, std::uint32_t>& server_counts) {
    for (const auto& [name, count] : server_counts) {
        type_names_.push_back(name);
        counts_.push_back(count);
    }
}

std::optional<ServerTypeId> Platform::find_type(std::string_view name) const {
    auto it = std::lower_bound(type_names_.begin(), type_names_.end(), name);
    if (it == type_names_.end() || *it != name) return std::nullopt;
    return ServerTypeId{static_cast<std::uint32_t>(it - type_names_.begin())};
}

std::vector<Server> Platform::make_servers() const {
    std::vector<Server> servers;
    for (std::uint32_t t = 0; t < counts_.size(); ++t) {
        for (std::uint32_t id = 0; id < counts_[t]; ++id) {
            Server s;
            s.type = ServerTypeId{t};
            s.id = id;
            s.index = servers.size();
            servers.push_back(std::move(s));
        }
    }
    return servers;
}

void SimClock::advance_to(double t) {
    if (t < now_) throw std::logic_error("simulation clock cannot move backwards");
    now_ = t;
}

double remaining_busy_time(const Server& server, double now) {
    if (!server.busy()) return 0.0;
    return std::max(0.0, *server.assign_time + *server.current_mean_estimate - now);
}

double assign_task(Server& server, Task& task, double now) {
    if (server.busy()) {
        throw PolicyFault("policy assigned task " + std::to_string(task.id) + " to busy server #" +
                          std::to_string(server.index));
    }
    const ServiceOption* option = task.option_for(server.type);
    if (option == nullptr) {
        throw PolicyFault("policy assigned task " + std::to_string(task.id) +
                          " to unsupported server #" + std::to_string(server.index));
    }
    server.current_task = task.id;
    server.assign_time = now;
    server.current_mean_estimate = option->mean;
    task.schedule_time = now;
    task.assigned_server = server.ref();
    return now + option->actual;
}

void release_server(Server& server, Task& task, double now) {
    const ServiceOption* option = task.option_for(server.type);
    server.busy_time_accum.add(option->actual);
    ++server.tasks_served;
    server.current_task.reset();
    server.assign_time.reset();
    server.current_mean_estimate.reset();
    task.completion_time = now;
}

}  // namespace qsched
