#include <qsched/trace_io.hpp>

#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace qsched {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::map<std::string, double> number_map(const json& v, const char* key) {
    if (!v.is_object()) throw TraceError(std::string(key) + ": expected an object");
    std::map<std::string, double> out;
    for (const auto& [name, value] : v.items()) {
        if (!value.is_number()) throw TraceError(std::string(key) + "." + name + ": expected a number");
        out[name] = value.get<double>();
    }
    return out;
}

}  // namespace

std::string format_trace_line(const TraceRecord& record) {
    ordered_json line;
    line["id"] = record.id;
    line["type"] = record.type_name;
    line["arrival_time"] = record.arrival_time;
    line["service_times"] = record.service_times;
    if (record.deadline) line["deadline"] = *record.deadline;
    if (record.power) line["power"] = *record.power;
    return line.dump();
}

TraceRecord parse_trace_line(std::string_view line) {
    json v;
    try {
        v = json::parse(line);
    } catch (const json::parse_error& e) {
        throw TraceError(std::string("malformed JSON: ") + e.what());
    }
    if (!v.is_object()) throw TraceError("expected a JSON object");

    TraceRecord record;
    const auto id = v.find("id");
    if (id == v.end() || !id->is_number_unsigned()) throw TraceError("id: expected a non-negative integer");
    record.id = id->get<TaskId>();
    const auto type = v.find("type");
    if (type == v.end() || !type->is_string()) throw TraceError("type: expected a string");
    record.type_name = type->get<std::string>();
    const auto arrival = v.find("arrival_time");
    if (arrival == v.end() || !arrival->is_number()) throw TraceError("arrival_time: expected a number");
    record.arrival_time = arrival->get<double>();
    if (auto st = v.find("service_times"); st != v.end()) record.service_times = number_map(*st, "service_times");
    if (auto dl = v.find("deadline"); dl != v.end()) {
        if (!dl->is_number()) throw TraceError("deadline: expected a number");
        record.deadline = dl->get<double>();
    }
    if (auto pw = v.find("power"); pw != v.end()) record.power = number_map(*pw, "power");
    return record;
}

std::vector<TraceRecord> read_trace_records(std::istream& in) {
    std::vector<TraceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            records.push_back(parse_trace_line(line));
        } catch (const TraceError& e) {
            throw TraceError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

void write_trace_records(std::ostream& out, std::span<const TraceRecord> records) {
    for (const auto& r : records) out << format_trace_line(r) << '\n';
}

TraceRecord to_trace_record(const Task& task, const Platform& platform) {
    TraceRecord record;
    record.id = task.id;
    record.type_name = task.type_name;
    record.arrival_time = task.arrival_time;
    record.deadline = task.deadline;
    for (const auto& option : task.targets) {
        const auto& name = platform.type_name(option.server_type);
        record.service_times[name] = option.actual;
        if (option.power) {
            if (!record.power) record.power.emplace();
            (*record.power)[name] = *option.power;
        }
    }
    return record;
}

std::vector<Task> tasks_from_trace(std::span<const TraceRecord> records, const SimConfig& cfg,
                                   const Platform& platform) {
    std::vector<Task> tasks;
    tasks.reserve(records.size());
    std::unordered_set<TaskId> ids;
    double previous_arrival = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        const std::string where = "trace record " + std::to_string(i + 1) + " (id " + std::to_string(r.id) + ")";
        if (!ids.insert(r.id).second) throw TraceError(where + ": duplicate id");
        if (!(r.arrival_time >= 0.0)) throw TraceError(where + ": arrival_time must be non-negative");
        if (r.arrival_time < previous_arrival) throw TraceError(where + ": arrivals are not sorted");
        previous_arrival = r.arrival_time;

        auto spec_it = cfg.simulation.tasks.find(r.type_name);
        const TaskTypeSpec* spec = spec_it == cfg.simulation.tasks.end() ? nullptr : &spec_it->second;
        if (r.service_times.empty()) {
            throw TraceError(where + (spec == nullptr ? ": unknown task type " + r.type_name + " with no service times"
                                                      : ": no service times"));
        }

        Task task;
        task.id = r.id;
        task.type_name = r.type_name;
        task.arrival_time = r.arrival_time;
        task.deadline = r.deadline ? r.deadline : (spec ? spec->deadline : std::nullopt);
        for (const auto& [server_name, actual] : r.service_times) {
            auto type = platform.find_type(server_name);
            if (!type) throw TraceError(where + ": unknown server type " + server_name);
            if (!(actual > 0.0)) throw TraceError(where + ": service time on " + server_name + " must be positive");
            ServiceOption option;
            option.server_type = *type;
            option.actual = actual;
            option.mean = actual;
            if (spec) {
                if (auto m = spec->mean_service_time.find(server_name); m != spec->mean_service_time.end()) {
                    option.mean = m->second;
                }
            }
            if (r.power) {
                if (auto p = r.power->find(server_name); p != r.power->end()) option.power = p->second;
            } else if (spec && spec->power) {
                if (auto p = spec->power->find(server_name); p != spec->power->end()) option.power = p->second;
            }
            task.targets.push_back(option);
        }
        order_targets(task.targets);
        tasks.push_back(std::move(task));
    }
    return tasks;
}

std::unique_ptr<WorkloadSource> read_trace(const std::string& path, const SimConfig& cfg,
                                           const Platform& platform) {
    std::ifstream in(path);
    if (!in) throw TraceError(path + ": cannot open trace file");
    auto records = read_trace_records(in);
    return std::make_unique<TaskListWorkload>(tasks_from_trace(records, cfg, platform));
}

void write_trace(std::span<const Task> tasks, const Platform& platform, const std::string& path) {
    TraceWriter writer(path, platform);
    for (const auto& task : tasks) writer.append(task);
    writer.flush();
}

TraceWriter::TraceWriter(const std::string& path, const Platform& platform)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), platform_(platform) {
    if (!out_) throw TraceError(path + ": cannot open trace file for writing");
}

void TraceWriter::append(const Task& task) {
    out_ << format_trace_line(to_trace_record(task, platform_)) << '\n';
    if (!out_) throw TraceError(path_ + ": write failed");
}

void TraceWriter::flush() {
    out_.flush();
    if (!out_) throw TraceError(path_ + ": write failed");
}

}  // namespace qsched
