// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <qsched/analytic.hpp>
#include <qsched/engine.hpp>
#include <qsched/experiment.hpp>
#include <qsched/trace_io.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace qsched;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
    std::printf("%s AC%d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string pct(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f%%", 100.0 * x);
    return buf;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

const std::vector<double> kUtilizations = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
constexpr std::uint64_t kValidationTasks = 1000000;

struct SweepResult {
    std::vector<ValidationPoint> points;
    double average = 0.0;
    double worst = 0.0;
    double worst_rho = 0.0;
};

SweepResult mmk_sweep(std::uint32_t k) {
    SweepResult s;
    for (std::size_t i = 0; i < kUtilizations.size(); ++i) {
        s.points.push_back(run_mmk_point(k, kUtilizations[i], kValidationTasks, derive_seed(0, i)));
        const double e = s.points.back().sample.relative_error;
        s.average += e;
        if (e > s.worst) {
            s.worst = e;
            s.worst_rho = kUtilizations[i];
        }
    }
    s.average /= static_cast<double>(kUtilizations.size());
    return s;
}

std::string point_list(const SweepResult& s) {
    std::string out;
    for (const auto& p : s.points) out += (out.empty() ? "" : " ") + num(p.rho).substr(0, 3) + ":" + pct(p.sample.relative_error);
    return out;
}

void mm1_validation() {
    const auto s = mmk_sweep(1);
    const bool ok = s.worst < 0.02 && s.average < 0.01;
    report(1, ok, "M/M/1 waiting time vs Erlang C",
           "average " + pct(s.average) + " (< 1%), worst " + pct(s.worst) + " at rho " + num(s.worst_rho) +
               " (< 2%) [" + point_list(s) + "]");
}

void mm23_validation() {
    const auto s2 = mmk_sweep(2);
    const auto s3 = mmk_sweep(3);
    const bool ok = s2.average < 0.02 && s3.average < 0.02;
    report(2, ok, "M/M/2 and M/M/3 waiting time vs Erlang C",
           "M/M/2 average " + pct(s2.average) + ", M/M/3 average " + pct(s3.average) + " (each < 2%)");
}

void convergence() {
    int passing = 0;
    std::string detail;
    const int seeds = 5;
    for (int seed = 0; seed < seeds; ++seed) {
        const double e50k = run_mmk_point(1, 0.5, 50000, seed).sample.relative_error;
        const double e200k = run_mmk_point(1, 0.5, 200000, seed).sample.relative_error;
        const double e1m = run_mmk_point(1, 0.5, 1000000, seed).sample.relative_error;
        const bool ok = e200k < 0.01 && e1m <= e50k;
        passing += ok;
        detail += " seed" + std::to_string(seed) + "[50K " + pct(e50k) + ", 200K " + pct(e200k) + ", 1M " +
                  pct(e1m) + (ok ? " ok]" : " no]");
    }
    report(3, passing * 2 > seeds, "convergence of M/M/1 error with task count",
           std::to_string(passing) + "/" + std::to_string(seeds) + " seeds pass;" + detail);
}

SimConfig soc_config() {
    SimConfig cfg = fixtures::reference_config();
    cfg.simulation.max_tasks_simulated = 100000;
    return cfg;
}

const std::vector<std::string> kPolicies = {"v1", "v2", "v3", "v4", "v5"};

void soc_arrival_sweep(const PolicyRegistry& registry) {
    const std::vector<std::string> arrivals = {"50", "75", "100"};
    const auto rows = run_sweep(soc_config(), SweepParam::MeanArrivalTime, arrivals, kPolicies, registry);
    std::map<std::string, std::map<std::string, const StatsReport*>> by;
    for (const auto& row : rows) by[row.policy][row.value] = &row.report;

    const double empty50 = queue_empty_fraction(*by["v1"]["50"]);
    const double empty100 = queue_empty_fraction(*by["v1"]["100"]);
    const bool ok4 = std::fabs(empty50 - 0.54) <= 0.05 && std::fabs(empty100 - 0.94) <= 0.03;
    report(4, ok4, "SoC queue-empty fraction under v1",
           "mean arrival 50: " + pct(empty50) + " (54% +/- 5), mean arrival 100: " + pct(empty100) +
               " (94% +/- 3)");

    auto response = [&](const std::string& p, const std::string& v) { return *by[p][v]->overall.response.mean; };
    bool ordering = response("v4", "50") <= response("v1", "50") && response("v5", "50") <= response("v1", "50");
    bool monotone = true;
    std::string detail;
    for (const auto& p : kPolicies) {
        detail += " " + p + "[";
        for (std::size_t i = 0; i < arrivals.size(); ++i) {
            detail += (i ? " " : "") + num(response(p, arrivals[i]));
            if (i > 0 && !(response(p, arrivals[i]) < response(p, arrivals[i - 1]))) monotone = false;
        }
        detail += "]";
    }
    report(5, ordering && monotone, "policy ordering and response vs arrival time",
           std::string("v4,v5 <= v1 at 50: ") + (ordering ? "yes" : "no") + ", monotone decrease: " +
               (monotone ? "yes" : "no") + ";" + detail);
}

void dispersion(const PolicyRegistry& registry) {
    const std::vector<std::string> factors = {"0.01", "0.05", "0.5"};
    const auto rows = run_sweep(soc_config(), SweepParam::StdevFactor, factors, {"v3", "v4"}, registry);
    std::map<std::string, std::map<std::string, double>> resp;
    for (const auto& row : rows) resp[row.policy][row.value] = *row.report.overall.response.mean;
    const bool ok = resp["v3"]["0.5"] > resp["v3"]["0.01"] && resp["v4"]["0.5"] > resp["v4"]["0.01"];
    std::string detail;
    for (const char* p : {"v3", "v4"}) {
        detail += std::string(detail.empty() ? "" : ", ") + p + " [";
        for (std::size_t i = 0; i < factors.size(); ++i) detail += (i ? " " : "") + num(resp[p][factors[i]]);
        detail += "]";
    }
    report(6, ok, "response grows with service-time dispersion for v3 and v4",
           "mean response at stdev factor 0.01/0.05/0.5: " + detail);
}

long double naive_erlang_c(unsigned k, long double a) {
    long double term = 1.0L, sum = 0.0L;
    for (unsigned n = 0; n < k; ++n) {
        sum += term;
        term *= a / (n + 1);
    }
    const long double tail = term / (1.0L - a / k);
    return tail / (sum + tail);
}

struct Check {
    std::string name;
    bool ok = true;
};

void properties(const PolicyRegistry& registry) {
    std::vector<Check> checks;

    {
        SimConfig cfg = soc_config();
        const auto a = report_to_json(run_simulation(cfg, registry).report).dump();
        const auto b = report_to_json(run_simulation(cfg, registry).report).dump();
        checks.push_back({"determinism", a == b});
    }

    {
        bool conserved = true, histogram = true;
        for (const auto& p : kPolicies) {
            SimConfig cfg = soc_config();
            cfg.simulation.max_tasks_simulated = 20000;
            cfg.simulation.sched_policy_module = p;
            RunOptions options;
            options.keep_task_records = true;
            ExactSum by_server;
            options.hooks.after_event = [&](double, const TaskQueue&, std::span<const Server> servers) {
                by_server = ExactSum{};
                for (const auto& s : servers) by_server.merge(s.busy_time_accum);
            };
            const auto result = run_simulation(cfg, registry, options);
            ExactSum by_task;
            for (const auto& r : result.records) by_task.add(r.computation);
            conserved &= by_server.value() == by_task.value() && result.report.total_busy_time == by_task.value();
            double sum = 0.0;
            for (const auto& [len, f] : result.report.queue_histogram) sum += f;
            histogram &= std::fabs(sum - 1.0) <= 1e-9;
        }
        checks.push_back({"conservation", conserved});
        checks.push_back({"histogram", histogram});
    }

    double little_error = 0.0;
    {
        const SimConfig cfg = mmk_config(1, 0.5, 1000000, 0);
        const auto r = run_simulation(cfg, registry).report;
        const double lambda = 1.0 / cfg.simulation.mean_arrival_time;
        const double lw = lambda * *r.overall.response.mean;
        little_error = std::fabs(r.mean_tasks_in_system - lw) / lw;
        checks.push_back({"little(" + pct(little_error) + ")", little_error < 0.02});
    }

    {
        const auto dir = std::filesystem::temp_directory_path() / "qsched_acceptance_replay";
        std::filesystem::create_directories(dir);
        bool same = true;
        for (const auto& p : kPolicies) {
            SimConfig cfg = soc_config();
            cfg.simulation.max_tasks_simulated = 20000;
            cfg.simulation.sched_policy_module = p;
            cfg.general.working_dir = dir.string();
            cfg.general.output_trace_file = "trace.jsonl";
            const auto original = run_simulation(cfg, registry).report;
            cfg.general.output_trace_file.clear();
            cfg.general.input_trace_file = "trace.jsonl";
            same &= run_simulation(cfg, registry).report == original;
        }
        std::filesystem::remove_all(dir);
        checks.push_back({"replay", same});
    }

    {
        auto log_for = [&](const std::string& policy, std::uint64_t window) {
            SimConfig cfg = soc_config();
            cfg.simulation.max_tasks_simulated = 20000;
            cfg.simulation.sched_policy_module = policy;
            cfg.simulation.scheduling_window = window;
            RunOptions options;
            std::ostringstream log;
            options.hooks.on_assignment = [&](double now, const Task& t, const Server& s) {
                log << now << ' ' << t.id << ' ' << s.index << '\n';
            };
            run_simulation(cfg, registry, options);
            return log.str();
        };
        checks.push_back({"v4(W=1)==v3", log_for("v4", 1) == log_for("v3", 10)});
    }

    {
        double worst = 0.0;
        for (unsigned k = 1; k <= 20; ++k) {
            for (double rho : {0.05, 0.3, 0.5, 0.7, 0.9, 0.99}) {
                analytic::MmkParams p;
                p.k = k;
                p.mu = 0.02;
                p.lambda = rho * k * p.mu;
                const double oracle = static_cast<double>(naive_erlang_c(k, p.offered_load()));
                worst = std::max(worst, std::fabs(analytic::erlang_c(p) - oracle) / oracle);
            }
        }
        checks.push_back({"erlang_c", worst < 1e-12});
    }

    {
        // Two servers; arrivals 0, 1, 2 with service 4, 4, 3. Worked by hand:
        // task 0 runs [0,4) on server 0, task 1 [1,5) on server 1, task 2
        // waits for server 0 and runs [4,7).
        SimConfig cfg = fixtures::single_type_config(2);
        const Platform platform(cfg.simulation.servers);
        std::vector<Task> tasks;
        const double arrival[] = {0, 1, 2}, service[] = {4, 4, 3};
        for (int i = 0; i < 3; ++i) {
            tasks.push_back(fixtures::make_plain_task(platform, i, "job", arrival[i], {{"cpu", service[i]}}));
        }
        TaskListWorkload workload(std::move(tasks));
        PolicyV1 policy;
        EngineOptions options;
        options.keep_task_records = true;
        const auto result = simulate(cfg, platform, policy, workload, options);
        std::map<TaskId, TaskRecord> by_id;
        for (const auto& r : result.records) by_id[r.id] = r;
        const bool ok = by_id.size() == 3 && by_id[0].schedule_time == 0 && by_id[0].completion_time == 4 &&
                        by_id[0].server_id == 0 && by_id[1].schedule_time == 1 && by_id[1].completion_time == 5 &&
                        by_id[1].server_id == 1 && by_id[2].schedule_time == 4 && by_id[2].completion_time == 7 &&
                        by_id[2].server_id == 0 && by_id[2].waiting == 2 && result.report.total_sim_time == 7;
        checks.push_back({"fifo-micro-oracle", ok});
    }

    bool all = true;
    std::string detail;
    for (const auto& c : checks) {
        all &= c.ok;
        detail += (detail.empty() ? "" : ", ") + c.name + (c.ok ? " ok" : " FAILED");
    }
    report(7, all, "property suite", detail);
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const PolicyRegistry registry = make_default_registry();
    mm1_validation();
    mm23_validation();
    convergence();
    soc_arrival_sweep(registry);
    dispersion(registry);
    properties(registry);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 7 criteria failed (%.1f s)\n", failures, secs);
    return failures;
}
