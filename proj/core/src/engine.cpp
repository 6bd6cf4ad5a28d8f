#include <qsched/engine.hpp>

#include <optional>
#include <queue>
#include <string>

namespace qsched {

bool fires_before(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.seq < b.seq;
}

namespace {

struct LaterFirst {
    bool operator()(const Event& a, const Event& b) const { return fires_before(b, a); }
};

class Simulation {
public:
    Simulation(const SimConfig& cfg, const Platform& platform, SchedulingPolicy& policy,
               WorkloadSource& workload, const EngineOptions& options)
        : cfg_(cfg),
          platform_(platform),
          policy_(policy),
          workload_(workload),
          options_(options),
          servers_(platform.make_servers()),
          running_(servers_.size()),
          collector_(options.keep_task_records) {}

    RunResult run() {
        policy_.init(servers_, PolicyParams{static_cast<std::size_t>(cfg_.simulation.scheduling_window)});
        fetch_next_arrival();

        while (!events_.empty()) {
            const Event ev = events_.top();
            events_.pop();
            occupancy_.accumulate(queue_.size(), clock_.now(), ev.time);
            clock_.advance_to(ev.time);

            if (ev.kind == EventKind::Completion) {
                complete(ev.server);
            } else {
                arrive();
            }
            schedule();
            if (options_.hooks.after_event) options_.hooks.after_event(clock_.now(), queue_, servers_);
        }

        const double now = clock_.now();
        RunResult result;
        result.report = finalize(collector_, occupancy_, servers_, platform_, now);
        result.report.policy = cfg_.simulation.sched_policy_module;
        result.report.seed = cfg_.general.random_seed;
        result.report.tasks_created = created_;
        result.report.policy_stats = policy_.output_final_stats(now);
        result.records = collector_.take_records();
        return result;
    }

private:
    void push(double time, EventKind kind, std::size_t server = 0) {
        events_.push(Event{time, kind, next_seq_++, server});
    }

    void fetch_next_arrival() {
        auto task = workload_.next();
        if (!task) return;
        if (task->arrival_time < last_arrival_ || task->arrival_time < clock_.now()) {
            throw SimulationError("workload produced task " + std::to_string(task->id) + " out of arrival order");
        }
        last_arrival_ = task->arrival_time;
        ++created_;
        if (options_.hooks.on_task_created) options_.hooks.on_task_created(*task);
        push(task->arrival_time, EventKind::Arrival);
        pending_arrival_ = std::move(task);
    }

    void arrive() {
        if (queue_.size() >= cfg_.simulation.max_queue_size) {
            throw SimulationError("task queue overflow: max_queue_size " +
                                  std::to_string(cfg_.simulation.max_queue_size) + " reached at time " +
                                  format_number(clock_.now()));
        }
        queue_.push_back(std::move(*pending_arrival_));
        pending_arrival_.reset();
        fetch_next_arrival();
    }

    void complete(std::size_t server_index) {
        Server& server = servers_[server_index];
        Task& task = *running_[server_index];
        release_server(server, task, clock_.now());
        policy_.remove_task_from_server(clock_.now(), server);
        collector_.add(make_record(task, platform_));
        running_[server_index].reset();
    }

    void schedule() {
        const double now = clock_.now();
        while (auto decision = policy_.assign_task_to_server(now, queue_)) {
            if (decision->queue_index >= queue_.size()) {
                throw PolicyFault("policy chose queue position " + std::to_string(decision->queue_index) +
                                  " in a queue of " + std::to_string(queue_.size()));
            }
            if (decision->server_index >= servers_.size()) {
                throw PolicyFault("policy chose nonexistent server #" + std::to_string(decision->server_index));
            }
            Server& server = servers_[decision->server_index];
            auto slot = queue_.begin() + static_cast<std::ptrdiff_t>(decision->queue_index);
            const double done = assign_task(server, *slot, now);
            running_[server.index] = std::move(*slot);
            queue_.erase(slot);
            if (options_.hooks.on_assignment) options_.hooks.on_assignment(now, *running_[server.index], server);
            push(done, EventKind::Completion, server.index);
        }
    }

    const SimConfig& cfg_;
    const Platform& platform_;
    SchedulingPolicy& policy_;
    WorkloadSource& workload_;
    const EngineOptions& options_;

    SimClock clock_;
    std::vector<Server> servers_;
    std::vector<std::optional<Task>> running_;
    TaskQueue queue_;
    std::priority_queue<Event, std::vector<Event>, LaterFirst> events_;
    std::uint64_t next_seq_ = 0;
    std::optional<Task> pending_arrival_;
    double last_arrival_ = 0.0;
    std::uint64_t created_ = 0;

    QueueOccupancy occupancy_;
    StatsCollector collector_;
};

}  // namespace

RunResult simulate(const SimConfig& cfg, const Platform& platform, SchedulingPolicy& policy,
                   WorkloadSource& workload, const EngineOptions& options) {
    return Simulation(cfg, platform, policy, workload, options).run();
}

StatsReport run(const SimConfig& cfg, SchedulingPolicy& policy, WorkloadSource& workload) {
    const Platform platform(cfg.simulation.servers);
    return simulate(cfg, platform, policy, workload).report;
}

}  // namespace qsched
