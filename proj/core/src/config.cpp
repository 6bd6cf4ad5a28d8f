#include <qsched/config.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace qsched {

using nlohmann::json;

std::string_view to_string(LogLevel level) {
    switch (level) {
    case LogLevel::Debug: return "DEBUG";
    case LogLevel::Info: return "INFO";
    case LogLevel::Warning: return "WARNING";
    case LogLevel::Error: return "ERROR";
    }
    return "INFO";
}

std::string_view to_string(ServiceDistribution dist) {
    return dist == ServiceDistribution::Exponential ? "exponential" : "normal";
}

std::optional<LogLevel> parse_log_level(std::string_view text) {
    if (text == "DEBUG") return LogLevel::Debug;
    if (text == "INFO") return LogLevel::Info;
    if (text == "WARNING") return LogLevel::Warning;
    if (text == "ERROR") return LogLevel::Error;
    return std::nullopt;
}

std::optional<ServiceDistribution> parse_service_distribution(std::string_view text) {
    if (text == "normal") return ServiceDistribution::Normal;
    if (text == "exponential") return ServiceDistribution::Exponential;
    return std::nullopt;
}

std::vector<std::string> TaskTypeSpec::preference_order() const {
    std::vector<std::pair<double, std::string>> ranked;
    ranked.reserve(mean_service_time.size());
    for (const auto& [server, mean] : mean_service_time) ranked.emplace_back(mean, server);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> order;
    order.reserve(ranked.size());
    for (auto& [mean, server] : ranked) order.push_back(std::move(server));
    return order;
}

namespace {

// Walks one JSON object, hands out typed fields and remembers which keys were
// consumed so the rest can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path, std::vector<std::string>* warnings)
        : obj_(obj), path_(std::move(path)), warnings_(warnings) {
        if (!obj_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
    }

    ObjectReader(const ObjectReader&) = delete;
    ObjectReader& operator=(const ObjectReader&) = delete;

    ~ObjectReader() {
        if (warnings_ == nullptr) return;
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.contains(key)) warnings_->push_back(key_path(key) + ": unknown key ignored");
        }
    }

    std::string key_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* value = find(key);
        if (value == nullptr) throw ConfigError(key_path(key) + ": required key missing");
        return *value;
    }

    void read(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(key_path(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }

    void read(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(key_path(key) + ": expected a boolean");
            out = v->get<bool>();
        }
    }

    void read(const std::string& key, double& out) {
        if (const json* v = find(key)) out = as_number(*v, key_path(key));
    }

    void read(const std::string& key, std::uint64_t& out) {
        if (const json* v = find(key)) out = as_unsigned(*v, key_path(key));
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path + ": expected a number");
        return v.get<double>();
    }

    static std::uint64_t as_unsigned(const json& v, const std::string& path) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            const auto signed_value = v.get<std::int64_t>();
            if (signed_value < 0) throw ConfigError(path + ": must be non-negative");
            return static_cast<std::uint64_t>(signed_value);
        }
        throw ConfigError(path + ": expected a non-negative integer");
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>* warnings_;
    std::set<std::string> seen_;
};

std::map<std::string, double> read_number_map(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path + ": expected an object of server type to number");
    std::map<std::string, double> out;
    for (const auto& [key, value] : v.items()) out[key] = ObjectReader::as_number(value, path + "." + key);
    return out;
}

GeneralConfig read_general(const json& v, std::vector<std::string>* warnings) {
    GeneralConfig general;
    ObjectReader reader(v, "general", warnings);
    if (const json* level = reader.find("logging_level")) {
        if (!level->is_string()) throw ConfigError("general.logging_level: expected a string");
        auto parsed = parse_log_level(level->get<std::string>());
        if (!parsed) {
            throw ConfigError("general.logging_level: expected one of DEBUG, INFO, WARNING, ERROR");
        }
        general.logging_level = *parsed;
    }
    reader.read("random_seed", general.random_seed);
    reader.read("working_dir", general.working_dir);
    reader.read("basename", general.basename);
    reader.read("pre_gen_arrivals", general.pre_gen_arrivals);
    reader.read("input_trace_file", general.input_trace_file);
    reader.read("output_trace_file", general.output_trace_file);
    return general;
}

TaskTypeSpec read_task(const std::string& name, const json& v, const std::string& path,
                       std::vector<std::string>* warnings) {
    TaskTypeSpec spec;
    spec.name = name;
    ObjectReader reader(v, path, warnings);
    spec.mean_service_time =
        read_number_map(reader.require("mean_service_time"), path + ".mean_service_time");
    if (const json* stdev = reader.find("stdev_service_time")) {
        spec.stdev_service_time = read_number_map(*stdev, path + ".stdev_service_time");
    } else {
        // Absent dispersion means deterministic service times.
        for (const auto& [server, mean] : spec.mean_service_time) spec.stdev_service_time[server] = 0.0;
    }
    if (const json* power = reader.find("power")) spec.power = read_number_map(*power, path + ".power");
    if (const json* deadline = reader.find("deadline")) {
        spec.deadline = ObjectReader::as_number(*deadline, path + ".deadline");
    }
    if (const json* dist = reader.find("service_distribution")) {
        auto parsed = dist->is_string() ? parse_service_distribution(dist->get<std::string>())
                                        : std::nullopt;
        if (!parsed) throw ConfigError(path + ".service_distribution: expected \"normal\" or \"exponential\"");
        spec.service_distribution = *parsed;
    }
    reader.read("weight", spec.weight);
    return spec;
}

SimulationConfig read_simulation(const json& v, bool realistic, std::vector<std::string>* warnings) {
    SimulationConfig sim;
    ObjectReader reader(v, "simulation", warnings);

    const json& policy = reader.require("sched_policy_module");
    if (!policy.is_string()) throw ConfigError("simulation.sched_policy_module: expected a string");
    sim.sched_policy_module = policy.get<std::string>();

    reader.read("max_tasks_simulated", sim.max_tasks_simulated);
    reader.read("mean_arrival_time", sim.mean_arrival_time);
    reader.read("arrival_time_scale", sim.arrival_time_scale);
    reader.read("power_mgmt_enabled", sim.power_mgmt_enabled);
    reader.read("max_queue_size", sim.max_queue_size);
    reader.read("scheduling_window", sim.scheduling_window);

    const json& servers = reader.require("servers");
    if (!servers.is_object()) throw ConfigError("simulation.servers: expected an object");
    for (const auto& [name, entry] : servers.items()) {
        const std::string path = "simulation.servers." + name;
        ObjectReader server_reader(entry, path, warnings);
        const auto count = ObjectReader::as_unsigned(server_reader.require("count"), path + ".count");
        if (count > std::numeric_limits<std::uint32_t>::max()) throw ConfigError(path + ".count: too large");
        sim.servers[name] = static_cast<std::uint32_t>(count);
    }

    const json* tasks = realistic ? reader.find("tasks") : &reader.require("tasks");
    if (tasks != nullptr) {
        if (!tasks->is_object()) throw ConfigError("simulation.tasks: expected an object");
        for (const auto& [name, entry] : tasks->items()) {
            sim.tasks[name] = read_task(name, entry, "simulation.tasks." + name, warnings);
        }
    }
    return sim;
}

}  // namespace

SimConfig parse_config(std::string_view json_text, std::vector<std::string>* warnings) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }

    SimConfig cfg;
    {
        ObjectReader top(doc, "", warnings);
        if (const json* general = top.find("general")) cfg.general = read_general(*general, warnings);
        cfg.simulation = read_simulation(top.require("simulation"), cfg.realistic_mode(), warnings);
    }

    auto diagnostics = validate_config(cfg);
    if (!diagnostics.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration:";
        for (const auto& d : diagnostics) msg << "\n  " << d;
        throw ConfigError(msg.str());
    }
    return cfg;
}

SimConfig load_config(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), warnings);
}

std::vector<std::string> validate_config(const SimConfig& cfg) {
    std::vector<std::string> out;
    const auto& sim = cfg.simulation;

    if (sim.sched_policy_module.empty()) out.push_back("simulation.sched_policy_module: must not be empty");
    if (sim.max_tasks_simulated == 0) out.push_back("simulation.max_tasks_simulated: must be positive");
    if (!(sim.mean_arrival_time > 0.0)) out.push_back("simulation.mean_arrival_time: must be positive");
    if (!(sim.arrival_time_scale > 0.0)) out.push_back("simulation.arrival_time_scale: must be positive");
    if (sim.max_queue_size == 0) out.push_back("simulation.max_queue_size: must be positive");
    if (sim.scheduling_window == 0) out.push_back("simulation.scheduling_window: must be positive");

    if (sim.servers.empty()) out.push_back("simulation.servers: at least one server type is required");
    for (const auto& [name, count] : sim.servers) {
        if (count == 0) out.push_back("simulation.servers." + name + ".count: must be positive");
    }

    if (sim.tasks.empty() && !cfg.realistic_mode()) {
        out.push_back("simulation.tasks: at least one task type is required in probabilistic mode");
    }
    for (const auto& [name, spec] : sim.tasks) {
        const std::string path = "simulation.tasks." + name;
        if (spec.mean_service_time.empty()) out.push_back(path + ".mean_service_time: must list at least one server type");
        for (const auto& [server, mean] : spec.mean_service_time) {
            if (!sim.servers.contains(server)) {
                out.push_back(path + ".mean_service_time." + server + ": server type not declared in simulation.servers");
            }
            if (!(mean > 0.0)) out.push_back(path + ".mean_service_time." + server + ": must be positive");
        }
        bool same_keys = spec.stdev_service_time.size() == spec.mean_service_time.size();
        for (const auto& [server, stdev] : spec.stdev_service_time) {
            if (!spec.mean_service_time.contains(server)) same_keys = false;
            if (!(stdev >= 0.0)) out.push_back(path + ".stdev_service_time." + server + ": must be non-negative");
        }
        if (!same_keys) out.push_back(path + ".stdev_service_time: server types must match mean_service_time");
        if (spec.power) {
            for (const auto& [server, power] : *spec.power) {
                if (!spec.mean_service_time.contains(server)) {
                    out.push_back(path + ".power." + server + ": server type not listed in mean_service_time");
                }
                if (!(power >= 0.0)) out.push_back(path + ".power." + server + ": must be non-negative");
            }
        }
        if (spec.deadline && !(*spec.deadline > 0.0)) out.push_back(path + ".deadline: must be positive");
        if (!(spec.weight > 0.0)) out.push_back(path + ".weight: must be positive");
    }
    return out;
}

nlohmann::json config_to_json(const SimConfig& cfg) {
    const auto& g = cfg.general;
    const auto& s = cfg.simulation;
    json servers = json::object();
    for (const auto& [name, count] : s.servers) servers[name] = {{"count", count}};
    json tasks = json::object();
    for (const auto& [name, spec] : s.tasks) {
        json t = {{"mean_service_time", spec.mean_service_time},
                  {"stdev_service_time", spec.stdev_service_time},
                  {"service_distribution", to_string(spec.service_distribution)},
                  {"weight", spec.weight}};
        if (spec.power) t["power"] = *spec.power;
        if (spec.deadline) t["deadline"] = *spec.deadline;
        tasks[name] = std::move(t);
    }
    return {
        {"general",
         {{"logging_level", to_string(g.logging_level)},
          {"random_seed", g.random_seed},
          {"working_dir", g.working_dir},
          {"basename", g.basename},
          {"pre_gen_arrivals", g.pre_gen_arrivals},
          {"input_trace_file", g.input_trace_file},
          {"output_trace_file", g.output_trace_file}}},
        {"simulation",
         {{"sched_policy_module", s.sched_policy_module},
          {"max_tasks_simulated", s.max_tasks_simulated},
          {"mean_arrival_time", s.mean_arrival_time},
          {"arrival_time_scale", s.arrival_time_scale},
          {"power_mgmt_enabled", s.power_mgmt_enabled},
          {"max_queue_size", s.max_queue_size},
          {"scheduling_window", s.scheduling_window},
          {"servers", std::move(servers)},
          {"tasks", std::move(tasks)}}},
    };
}

std::string serialize_config(const SimConfig& cfg) { return config_to_json(cfg).dump(2); }

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "general",
        "general.logging_level",
        "general.random_seed",
        "general.working_dir",
        "general.basename",
        "general.pre_gen_arrivals",
        "general.input_trace_file",
        "general.output_trace_file",
        "simulation",
        "simulation.sched_policy_module",
        "simulation.max_tasks_simulated",
        "simulation.mean_arrival_time",
        "simulation.arrival_time_scale",
        "simulation.power_mgmt_enabled",
        "simulation.max_queue_size",
        "simulation.scheduling_window",
        "simulation.servers",
        "simulation.servers.*.count",
        "simulation.tasks",
        "simulation.tasks.*.mean_service_time",
        "simulation.tasks.*.stdev_service_time",
        "simulation.tasks.*.power",
        "simulation.tasks.*.deadline",
        "simulation.tasks.*.service_distribution",
        "simulation.tasks.*.weight",
    };
    return keys;
}

}  // namespace qsched
