#include <qsched/stats.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qsched {

using nlohmann::json;

TaskRecord make_record(const Task& task, const Platform& platform) {
    if (!task.schedule_time || !task.completion_time || !task.assigned_server) {
        throw std::logic_error("task " + std::to_string(task.id) + " has not completed");
    }
    const ServiceOption* option = task.option_for(task.assigned_server->type);
    TaskRecord r;
    r.id = task.id;
    r.type_name = task.type_name;
    r.arrival_time = task.arrival_time;
    r.schedule_time = *task.schedule_time;
    r.completion_time = *task.completion_time;
    r.server_type = platform.type_name(task.assigned_server->type);
    r.server_id = task.assigned_server->id;
    r.waiting = r.schedule_time - r.arrival_time;
    r.computation = option->actual;
    r.response = r.waiting + r.computation;
    if (task.deadline) r.deadline_met = r.response <= *task.deadline;
    if (option->power) r.energy = *option->power * r.computation;
    return r;
}

void RunningMoments::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

std::optional<double> RunningMoments::mean() const {
    if (n_ == 0) return std::nullopt;
    return mean_;
}

std::optional<double> RunningMoments::stdev() const {
    if (n_ == 0) return std::nullopt;
    return std::sqrt(m2_ / static_cast<double>(n_));
}

void TimingAccumulator::add(const TaskRecord& record) {
    waiting_.add(record.waiting);
    computation_.add(record.computation);
    response_.add(record.response);
}

TimingSummary TimingAccumulator::summary() const {
    TimingSummary s;
    s.count = waiting_.count();
    s.waiting = {waiting_.mean(), waiting_.stdev()};
    s.computation = {computation_.mean(), computation_.stdev()};
    s.response.stdev = response_.stdev();
    if (s.count > 0) s.response.mean = *s.waiting.mean + *s.computation.mean;
    return s;
}

void QueueOccupancy::accumulate(std::size_t length, double from, double to) {
    if (to < from) throw std::logic_error("occupancy interval runs backwards");
    if (length >= by_length_.size()) by_length_.resize(length + 1);
    if (to > from) by_length_[length].add_difference(to, from);
}

double QueueOccupancy::time_at(std::size_t length) const {
    return length < by_length_.size() ? by_length_[length].value() : 0.0;
}

double QueueOccupancy::total_time() const {
    ExactSum total;
    for (const auto& bucket : by_length_) total.merge(bucket);
    return total.value();
}

double QueueOccupancy::length_time_integral() const {
    double integral = 0.0;
    for (std::size_t n = 1; n < by_length_.size(); ++n) integral += static_cast<double>(n) * by_length_[n].value();
    return integral;
}

void StatsCollector::add(TaskRecord record) {
    ++completed_;
    overall_.add(record);
    per_task_type_[record.type_name].add(record);
    per_server_type_[record.server_type].add(record);
    computation_.add(record.computation);
    if (record.deadline_met && !*record.deadline_met) ++deadline_misses_;
    if (record.energy) {
        energy_.add(*record.energy);
        has_energy_ = true;
    }
    if (keep_records_) records_.push_back(std::move(record));
}

std::optional<double> StatsCollector::total_energy() const {
    if (!has_energy_) return std::nullopt;
    return energy_.value();
}

StatsReport finalize(const StatsCollector& collector, const QueueOccupancy& occupancy,
                     std::span<const Server> servers, const Platform& platform, double sim_time) {
    StatsReport report;
    report.tasks_completed = collector.completed();
    report.deadline_misses = collector.deadline_misses();
    report.total_sim_time = sim_time;
    report.overall = collector.overall().summary();
    for (const auto& [name, acc] : collector.per_task_type()) report.per_task_type[name] = acc.summary();
    report.total_energy = collector.total_energy();

    auto fraction = [sim_time](double busy) { return sim_time > 0.0 ? busy / sim_time : 0.0; };

    ExactSum all_busy;
    std::vector<ExactSum> busy_by_type(platform.server_types().size());
    for (const auto& server : servers) {
        ServerStats s;
        s.type = platform.type_name(server.type);
        s.id = server.id;
        s.busy_time = server.busy_time_accum.value();
        s.utilization = fraction(s.busy_time);
        s.tasks_served = server.tasks_served;
        report.per_server.push_back(std::move(s));
        all_busy.merge(server.busy_time_accum);
        busy_by_type[server.type.value].merge(server.busy_time_accum);
    }
    report.total_busy_time = all_busy.value();

    for (std::uint32_t t = 0; t < busy_by_type.size(); ++t) {
        ServerTypeStats s;
        s.type = platform.type_name(ServerTypeId{t});
        s.count = platform.count(ServerTypeId{t});
        s.busy_time = busy_by_type[t].value();
        s.utilization = s.count > 0 ? fraction(s.busy_time) / s.count : 0.0;
        if (auto it = collector.per_server_type().find(s.type); it != collector.per_server_type().end()) {
            s.timing = it->second.summary();
        }
        report.per_server_type.push_back(std::move(s));
    }

    if (sim_time > 0.0) {
        for (std::size_t n = 0; n <= occupancy.max_length(); ++n) {
            const double t = occupancy.time_at(n);
            if (t > 0.0) report.queue_histogram[n] = t / sim_time;
        }
        report.mean_queue_length = occupancy.length_time_integral() / sim_time;
        report.mean_tasks_in_system = (occupancy.length_time_integral() + report.total_busy_time) / sim_time;
    } else {
        report.queue_histogram[0] = 1.0;
    }
    return report;
}

StatsReport finalize(std::span<const TaskRecord> records, const QueueOccupancy& occupancy,
                     std::span<const Server> servers, const Platform& platform, double sim_time) {
    StatsCollector collector;
    for (const auto& r : records) collector.add(r);
    return finalize(collector, occupancy, servers, platform, sim_time);
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_double(const json& v) {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

json moments_json(const Moments& m) { return {{"mean", optional_json(m.mean)}, {"stdev", optional_json(m.stdev)}}; }

Moments moments_from(const json& v) { return {optional_double(v.at("mean")), optional_double(v.at("stdev"))}; }

json timing_json(const TimingSummary& t) {
    return {{"count", t.count},
            {"waiting", moments_json(t.waiting)},
            {"computation", moments_json(t.computation)},
            {"response", moments_json(t.response)}};
}

TimingSummary timing_from(const json& v) {
    TimingSummary t;
    t.count = v.at("count").get<std::uint64_t>();
    t.waiting = moments_from(v.at("waiting"));
    t.computation = moments_from(v.at("computation"));
    t.response = moments_from(v.at("response"));
    return t;
}

}  // namespace

json report_to_json(const StatsReport& r) {
    json per_type = json::object();
    for (const auto& [name, t] : r.per_task_type) per_type[name] = timing_json(t);
    json per_server = json::array();
    for (const auto& s : r.per_server) {
        per_server.push_back({{"type", s.type},
                              {"id", s.id},
                              {"busy_time", s.busy_time},
                              {"utilization", s.utilization},
                              {"tasks_served", s.tasks_served}});
    }
    json per_server_type = json::array();
    for (const auto& s : r.per_server_type) {
        per_server_type.push_back({{"type", s.type},
                                   {"count", s.count},
                                   {"busy_time", s.busy_time},
                                   {"utilization", s.utilization},
                                   {"timing", timing_json(s.timing)}});
    }
    json histogram = json::array();
    for (const auto& [length, frac] : r.queue_histogram) {
        histogram.push_back({{"queue_length", length}, {"fraction", frac}});
    }
    json policy_stats = json::array();
    for (const auto& v : r.policy_stats) policy_stats.push_back({{"label", v.label}, {"value", v.value}});

    return {{"policy", r.policy},
            {"seed", r.seed},
            {"tasks_created", r.tasks_created},
            {"tasks_completed", r.tasks_completed},
            {"deadline_misses", r.deadline_misses},
            {"total_sim_time", r.total_sim_time},
            {"total_busy_time", r.total_busy_time},
            {"overall", timing_json(r.overall)},
            {"per_task_type", std::move(per_type)},
            {"per_server", std::move(per_server)},
            {"per_server_type", std::move(per_server_type)},
            {"queue_histogram", std::move(histogram)},
            {"mean_queue_length", r.mean_queue_length},
            {"mean_tasks_in_system", r.mean_tasks_in_system},
            {"total_energy", optional_json(r.total_energy)},
            {"policy_stats", std::move(policy_stats)}};
}

StatsReport report_from_json(const json& v) {
    StatsReport r;
    r.policy = v.at("policy").get<std::string>();
    r.seed = v.at("seed").get<std::uint64_t>();
    r.tasks_created = v.at("tasks_created").get<std::uint64_t>();
    r.tasks_completed = v.at("tasks_completed").get<std::uint64_t>();
    r.deadline_misses = v.at("deadline_misses").get<std::uint64_t>();
    r.total_sim_time = v.at("total_sim_time").get<double>();
    r.total_busy_time = v.at("total_busy_time").get<double>();
    r.overall = timing_from(v.at("overall"));
    for (const auto& [name, t] : v.at("per_task_type").items()) r.per_task_type[name] = timing_from(t);
    for (const auto& s : v.at("per_server")) {
        r.per_server.push_back({s.at("type").get<std::string>(), s.at("id").get<std::uint32_t>(),
                                s.at("busy_time").get<double>(), s.at("utilization").get<double>(),
                                s.at("tasks_served").get<std::uint64_t>()});
    }
    for (const auto& s : v.at("per_server_type")) {
        r.per_server_type.push_back({s.at("type").get<std::string>(), s.at("count").get<std::uint32_t>(),
                                     s.at("busy_time").get<double>(), s.at("utilization").get<double>(),
                                     timing_from(s.at("timing"))});
    }
    for (const auto& h : v.at("queue_histogram")) {
        r.queue_histogram[h.at("queue_length").get<std::uint64_t>()] = h.at("fraction").get<double>();
    }
    r.mean_queue_length = v.at("mean_queue_length").get<double>();
    r.mean_tasks_in_system = v.at("mean_tasks_in_system").get<double>();
    r.total_energy = optional_double(v.at("total_energy"));
    for (const auto& p : v.at("policy_stats")) {
        r.policy_stats.push_back({p.at("label").get<std::string>(), p.at("value").get<double>()});
    }
    return r;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

void timing_columns(std::ostream& out, const TimingSummary& t) {
    out << t.count << ',' << opt(t.waiting.mean) << ',' << opt(t.waiting.stdev) << ','
        << opt(t.computation.mean) << ',' << opt(t.computation.stdev) << ',' << opt(t.response.mean) << ','
        << opt(t.response.stdev);
}

constexpr const char* kTimingHeader =
    "count,mean_waiting,stdev_waiting,mean_computation,stdev_computation,mean_response,stdev_response";

}  // namespace

void write_report(const StatsReport& report, ReportFormat format, const std::string& path,
                  const json& provenance) {
    if (format == ReportFormat::Json) {
        json doc = report_to_json(report);
        if (!provenance.is_null()) doc["effective_config"] = provenance;
        auto out = open_for_write(path);
        out << doc.dump(2) << '\n';
        finish(out, path);
        return;
    }

    {
        const std::string file = path + "summary.csv";
        auto out = open_for_write(file);
        out << "key,value\r\n";
        auto row = [&out](std::string_view key, const std::string& value) {
            out << csv_field(key) << ',' << csv_field(value) << "\r\n";
        };
        row("policy", report.policy);
        row("seed", std::to_string(report.seed));
        row("tasks_created", std::to_string(report.tasks_created));
        row("tasks_completed", std::to_string(report.tasks_completed));
        row("deadline_misses", std::to_string(report.deadline_misses));
        row("total_sim_time", format_number(report.total_sim_time));
        row("total_busy_time", format_number(report.total_busy_time));
        row("mean_waiting", opt(report.overall.waiting.mean));
        row("mean_computation", opt(report.overall.computation.mean));
        row("mean_response", opt(report.overall.response.mean));
        row("mean_queue_length", format_number(report.mean_queue_length));
        row("mean_tasks_in_system", format_number(report.mean_tasks_in_system));
        row("total_energy", opt(report.total_energy));
        for (const auto& v : report.policy_stats) row("policy." + v.label, format_number(v.value));
        finish(out, file);
    }
    {
        const std::string file = path + "per_task_type.csv";
        auto out = open_for_write(file);
        out << "task_type," << kTimingHeader << "\r\n";
        for (const auto& [name, t] : report.per_task_type) {
            out << csv_field(name) << ',';
            timing_columns(out, t);
            out << "\r\n";
        }
        finish(out, file);
    }
    {
        const std::string file = path + "per_server.csv";
        auto out = open_for_write(file);
        out << "server_type,server_id,busy_time,utilization,tasks_served\r\n";
        for (const auto& s : report.per_server) {
            out << csv_field(s.type) << ',' << s.id << ',' << format_number(s.busy_time) << ','
                << format_number(s.utilization) << ',' << s.tasks_served << "\r\n";
        }
        finish(out, file);
    }
    {
        const std::string file = path + "per_server_type.csv";
        auto out = open_for_write(file);
        out << "server_type,servers,busy_time,utilization," << kTimingHeader << "\r\n";
        for (const auto& s : report.per_server_type) {
            out << csv_field(s.type) << ',' << s.count << ',' << format_number(s.busy_time) << ','
                << format_number(s.utilization) << ',';
            timing_columns(out, s.timing);
            out << "\r\n";
        }
        finish(out, file);
    }
    {
        const std::string file = path + "queue_histogram.csv";
        auto out = open_for_write(file);
        out << "queue_length,fraction\r\n";
        for (const auto& [length, frac] : report.queue_histogram) {
            out << length << ',' << format_number(frac) << "\r\n";
        }
        finish(out, file);
    }
}

}  // namespace qsched
