#include <qsched/experiment.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <memory>

#include <qsched/sampling.hpp>
#include <qsched/trace_io.hpp>
#include <qsched/workload.hpp>

namespace qsched {

std::string resolve_path(const SimConfig& cfg, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || cfg.general.working_dir.empty()) return p.string();
    return (std::filesystem::path(cfg.general.working_dir) / p).lexically_normal().string();
}

RunResult run_simulation(const SimConfig& cfg, const PolicyRegistry& registry, const RunOptions& options) {
    auto policy = registry.resolve(cfg.simulation.sched_policy_module);
    const Platform platform(cfg.simulation.servers);

    EngineOptions engine_options;
    engine_options.keep_task_records = options.keep_task_records;
    engine_options.hooks = options.hooks;

    std::unique_ptr<WorkloadSource> workload;
    std::unique_ptr<TraceWriter> trace_writer;
    const bool emit_trace = !cfg.general.output_trace_file.empty();
    const std::string trace_path = emit_trace ? resolve_path(cfg, cfg.general.output_trace_file) : std::string();

    if (cfg.realistic_mode()) {
        workload = read_trace(resolve_path(cfg, cfg.general.input_trace_file), cfg, platform);
        if (emit_trace) {
            const auto& tasks = static_cast<TaskListWorkload&>(*workload).tasks();
            write_trace(tasks, platform, trace_path);
        }
    } else if (cfg.general.pre_gen_arrivals) {
        auto write_all = [&](const std::vector<Task>& tasks) {
            if (emit_trace) write_trace(tasks, platform, trace_path);
        };
        workload = generate_arrivals(cfg, platform, Rng(cfg.general.random_seed), write_all);
    } else {
        workload = generate_arrivals(cfg, platform, Rng(cfg.general.random_seed));
        if (emit_trace) {
            trace_writer = std::make_unique<TraceWriter>(trace_path, platform);
            auto user_hook = engine_options.hooks.on_task_created;
            engine_options.hooks.on_task_created = [&writer = *trace_writer, user_hook](const Task& task) {
                writer.append(task);
                if (user_hook) user_hook(task);
            };
        }
    }

    RunResult result = simulate(cfg, platform, *policy, *workload, engine_options);
    if (trace_writer) trace_writer->flush();
    return result;
}

SimConfig mmk_config(std::uint32_t k, double rho, std::uint64_t tasks, std::uint64_t seed, double mean_service) {
    const auto params = analytic::MmkParams::at_utilization(k, rho, mean_service);
    SimConfig cfg;
    cfg.general.random_seed = seed;
    cfg.simulation.sched_policy_module = "v1";
    cfg.simulation.max_tasks_simulated = tasks;
    cfg.simulation.mean_arrival_time = 1.0 / params.lambda;
    cfg.simulation.arrival_time_scale = 1.0;
    cfg.simulation.max_queue_size = std::max<std::uint64_t>(tasks, 1);
    cfg.simulation.servers["server"] = k;
    TaskTypeSpec spec;
    spec.name = "task";
    spec.mean_service_time["server"] = mean_service;
    spec.stdev_service_time["server"] = 0.0;
    spec.service_distribution = ServiceDistribution::Exponential;
    cfg.simulation.tasks[spec.name] = spec;
    return cfg;
}

ValidationPoint run_mmk_point(std::uint32_t k, double rho, std::uint64_t tasks, std::uint64_t seed,
                              double mean_service) {
    const SimConfig cfg = mmk_config(k, rho, tasks, seed, mean_service);
    static const PolicyRegistry registry = make_default_registry();
    const RunResult result = run_simulation(cfg, registry);
    ValidationPoint point;
    point.k = k;
    point.rho = rho;
    point.tasks = tasks;
    point.seed = seed;
    const double simulated = result.report.overall.waiting.mean.value_or(0.0);
    point.sample = analytic::compare_wait(simulated, analytic::MmkParams::at_utilization(k, rho, mean_service));
    return point;
}

void write_validation_csv(const std::vector<ValidationPoint>& points, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "servers,utilization,tasks,seed,simulated_wait,analytical_wait,relative_error\r\n";
    for (const auto& p : points) {
        out << p.k << ',' << format_number(p.rho) << ',' << p.tasks << ',' << p.seed << ','
            << format_number(p.sample.simulated_wait) << ',' << format_number(p.sample.analytical_wait) << ','
            << format_number(p.sample.relative_error) << "\r\n";
    }
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::optional<SweepParam> parse_sweep_param(std::string_view name) {
    if (name == "mean_arrival_time") return SweepParam::MeanArrivalTime;
    if (name == "arrival_time_scale") return SweepParam::ArrivalTimeScale;
    if (name == "stdev_factor") return SweepParam::StdevFactor;
    if (name == "sched_policy_module") return SweepParam::Policy;
    return std::nullopt;
}

std::string_view to_string(SweepParam param) {
    switch (param) {
    case SweepParam::MeanArrivalTime: return "mean_arrival_time";
    case SweepParam::ArrivalTimeScale: return "arrival_time_scale";
    case SweepParam::StdevFactor: return "stdev_factor";
    case SweepParam::Policy: return "sched_policy_module";
    }
    return "";
}

const std::vector<std::string>& sweep_param_names() {
    static const std::vector<std::string> names = {"mean_arrival_time", "arrival_time_scale", "stdev_factor",
                                                   "sched_policy_module"};
    return names;
}

namespace {

double parse_positive(const std::string& text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !(value > 0.0)) {
        throw ConfigError(std::string(what) + ": expected a positive number, got \"" + text + "\"");
    }
    return value;
}

}  // namespace

void apply_sweep_value(SimConfig& cfg, SweepParam param, const std::string& value) {
    switch (param) {
    case SweepParam::MeanArrivalTime:
        cfg.simulation.mean_arrival_time = parse_positive(value, "mean_arrival_time");
        break;
    case SweepParam::ArrivalTimeScale:
        cfg.simulation.arrival_time_scale = parse_positive(value, "arrival_time_scale");
        break;
    case SweepParam::StdevFactor: {
        const double factor = parse_positive(value, "stdev_factor");
        for (auto& [name, spec] : cfg.simulation.tasks) {
            for (const auto& [server, mean] : spec.mean_service_time) spec.stdev_service_time[server] = factor * mean;
        }
        break;
    }
    case SweepParam::Policy:
        if (value.empty()) throw ConfigError("sched_policy_module: empty policy name");
        cfg.simulation.sched_policy_module = value;
        break;
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base + index; }

std::vector<SweepRow> run_sweep(const SimConfig& base, SweepParam param, const std::vector<std::string>& values,
                                const std::vector<std::string>& policies, const PolicyRegistry& registry) {
    if (param == SweepParam::Policy && !policies.empty()) {
        throw ConfigError("a policy list cannot be combined with a sched_policy_module sweep");
    }
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
        SimConfig cfg = base;
        apply_sweep_value(cfg, param, values[i]);
        cfg.general.random_seed = derive_seed(base.general.random_seed, i);
        // Sweeps never overwrite a configured trace with every point.
        cfg.general.output_trace_file.clear();

        std::vector<std::string> run_policies = policies;
        if (run_policies.empty()) run_policies.push_back(cfg.simulation.sched_policy_module);
        for (const auto& policy : run_policies) {
            SimConfig run_cfg = cfg;
            run_cfg.simulation.sched_policy_module = policy;
            if (auto problems = validate_config(run_cfg); !problems.empty()) throw ConfigError(problems.front());
            SweepRow row;
            row.value = values[i];
            row.policy = policy;
            row.seed = run_cfg.general.random_seed;
            row.report = run_simulation(run_cfg, registry).report;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

double queue_empty_fraction(const StatsReport& report) {
    auto it = report.queue_histogram.find(0);
    return it == report.queue_histogram.end() ? 0.0 : it->second;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, SweepParam param, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "param,value,policy,seed,tasks_completed,mean_waiting,mean_computation,mean_response,"
           "stdev_response,queue_empty_fraction,mean_queue_length,total_sim_time\r\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << to_string(param) << ',' << csv_field(row.value) << ',' << csv_field(row.policy) << ',' << row.seed
            << ',' << r.tasks_completed << ',' << opt(r.overall.waiting.mean) << ','
            << opt(r.overall.computation.mean) << ',' << opt(r.overall.response.mean) << ','
            << opt(r.overall.response.stdev) << ',' << format_number(queue_empty_fraction(r)) << ','
            << format_number(r.mean_queue_length) << ',' << format_number(r.total_sim_time) << "\r\n";
    }
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_sweep_histogram_csv(const std::vector<SweepRow>& rows, SweepParam param, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "param,value,policy,queue_length,fraction\r\n";
    for (const auto& row : rows) {
        for (const auto& [length, frac] : row.report.queue_histogram) {
            out << to_string(param) << ',' << csv_field(row.value) << ',' << csv_field(row.policy) << ','
                << length << ',' << format_number(frac) << "\r\n";
        }
    }
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace qsched
