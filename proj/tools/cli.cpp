#include "cli.hpp"

#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include <qsched/analytic.hpp>
#include <qsched/config.hpp>
#include <qsched/engine.hpp>
#include <qsched/experiment.hpp>
#include <qsched/policy.hpp>
#include <qsched/trace_io.hpp>

namespace qsched::cli {

namespace {

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string policy;
    std::string out;
};

struct ValidateArgs {
    std::uint32_t servers = 1;
    std::vector<double> utilizations = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::uint64_t tasks = 1000000;
    std::uint64_t seed = 0;
    double mean_service = 50.0;
    std::string out = ".";
};

struct SweepArgs {
    std::string config;
    std::string param;
    std::vector<std::string> values;
    std::vector<std::string> policies;
    std::optional<std::uint64_t> seed;
    std::string out;
};

struct Args {
    RunArgs run;
    ValidateArgs validate;
    SweepArgs sweep;
};

class Logger {
public:
    Logger(std::ostream& err, LogLevel threshold) : err_(err), threshold_(threshold) {}

    void log(LogLevel level, const std::string& message) const {
        if (level < threshold_) return;
        err_ << "[" << to_string(level) << "] " << message << '\n';
    }

private:
    std::ostream& err_;
    LogLevel threshold_;
};

std::unique_ptr<CLI::App> build_app(Args& args) {
    auto app = std::make_unique<CLI::App>("Queue-based scheduling simulator for heterogeneous multiprocessors",
                                          "qsched");
    app->require_subcommand(1);

    auto* run = app->add_subcommand("run", "Run one simulation described by a JSON configuration");
    run->add_option("--config", args.run.config, "Configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", args.run.seed, "Override general.random_seed");
    run->add_option("--policy", args.run.policy, "Override simulation.sched_policy_module");
    run->add_option("--out", args.run.out, "Output directory (default: general.working_dir)");

    auto* validate = app->add_subcommand("validate", "Compare simulated M/M/k waiting times with Erlang C");
    validate->add_option("--servers", args.validate.servers, "Number of identical servers k")
        ->check(CLI::PositiveNumber);
    validate->add_option("--utilizations", args.validate.utilizations, "Utilizations in (0,1)")
        ->delimiter(',');
    validate->add_option("--tasks", args.validate.tasks, "Simulated tasks per point")->check(CLI::PositiveNumber);
    validate->add_option("--seed", args.validate.seed, "Base seed; point i uses seed + i");
    validate->add_option("--mean-service", args.validate.mean_service, "Mean service time")
        ->check(CLI::PositiveNumber);
    validate->add_option("--out", args.validate.out, "Output directory");

    auto* sweep = app->add_subcommand("sweep", "Run one simulation per parameter value (and policy)");
    sweep->add_option("--config", args.sweep.config, "Base configuration file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--param", args.sweep.param, "Swept parameter")
        ->required()
        ->check(CLI::IsMember(sweep_param_names()));
    sweep->add_option("--values", args.sweep.values, "Values to sweep")->required()->delimiter(',');
    sweep->add_option("--policies", args.sweep.policies, "Policies to cross with every value")->delimiter(',');
    sweep->add_option("--seed", args.sweep.seed, "Base seed; value i uses seed + i");
    sweep->add_option("--out", args.sweep.out, "Output directory (default: general.working_dir)");
    return app;
}

SimConfig load_with_warnings(const std::string& path, std::ostream& err) {
    std::vector<std::string> warnings;
    SimConfig cfg = load_config(path, &warnings);
    const Logger logger(err, cfg.general.logging_level);
    for (const auto& w : warnings) logger.log(LogLevel::Warning, path + ": " + w);
    return cfg;
}

std::string output_prefix(const std::string& out_dir, const SimConfig& cfg) {
    const std::string dir = out_dir.empty() ? cfg.general.working_dir : out_dir;
    std::filesystem::create_directories(dir.empty() ? "." : dir);
    return (std::filesystem::path(dir.empty() ? "." : dir) / cfg.general.basename).string();
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
    SimConfig cfg = load_with_warnings(a.config, err);
    if (a.seed) cfg.general.random_seed = *a.seed;
    if (!a.policy.empty()) cfg.simulation.sched_policy_module = a.policy;

    const PolicyRegistry registry = make_default_registry();
    if (!registry.contains(cfg.simulation.sched_policy_module)) {
        throw ConfigError("simulation.sched_policy_module: unknown policy " + cfg.simulation.sched_policy_module);
    }
    const Logger logger(err, cfg.general.logging_level);
    logger.log(LogLevel::Info, "running " + std::string(cfg.realistic_mode() ? "trace replay" : "probabilistic") +
                                   " simulation with policy " + cfg.simulation.sched_policy_module);

    const RunResult result = run_simulation(cfg, registry);
    const std::string prefix = output_prefix(a.out, cfg);
    write_report(result.report, ReportFormat::Json, prefix + "report.json", config_to_json(cfg));
    write_report(result.report, ReportFormat::Csv, prefix);

    const auto& r = result.report;
    out << "policy " << r.policy << ", seed " << r.seed << ": " << r.tasks_completed << " tasks completed\n";
    out << "mean waiting " << format_number(r.overall.waiting.mean.value_or(0.0)) << ", mean response "
        << format_number(r.overall.response.mean.value_or(0.0)) << ", simulated time "
        << format_number(r.total_sim_time) << '\n';
    out << "report: " << prefix << "report.json\n";
    return kSuccess;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream&) {
    for (double rho : a.utilizations) {
        if (!(rho > 0.0 && rho < 1.0)) {
            throw ConfigError("--utilizations: " + format_number(rho) + " is outside (0, 1)");
        }
    }
    std::vector<ValidationPoint> points;
    double total_error = 0.0;
    out << "servers utilization simulated_wait analytical_wait relative_error\n";
    for (std::size_t i = 0; i < a.utilizations.size(); ++i) {
        auto p = run_mmk_point(a.servers, a.utilizations[i], a.tasks, derive_seed(a.seed, i), a.mean_service);
        out << p.k << ' ' << format_number(p.rho) << ' ' << format_number(p.sample.simulated_wait) << ' '
            << format_number(p.sample.analytical_wait) << ' ' << format_number(p.sample.relative_error) << '\n';
        total_error += p.sample.relative_error;
        points.push_back(p);
    }
    if (!points.empty()) {
        out << "average relative error " << format_number(total_error / static_cast<double>(points.size())) << '\n';
    }
    std::filesystem::create_directories(a.out);
    const std::string path =
        (std::filesystem::path(a.out) / ("mm" + std::to_string(a.servers) + "_validation.csv")).string();
    write_validation_csv(points, path);
    out << "table: " << path << '\n';
    return kSuccess;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    SimConfig cfg = load_with_warnings(a.config, err);
    if (a.seed) cfg.general.random_seed = *a.seed;
    const auto param = parse_sweep_param(a.param);
    if (!param) throw ConfigError("--param: unknown sweep parameter " + a.param);

    const PolicyRegistry registry = make_default_registry();
    std::vector<std::string> names = a.policies;
    if (*param == SweepParam::Policy) names = a.values;
    for (const auto& name : names) {
        if (!registry.contains(name)) throw ConfigError("unknown policy " + name);
    }

    const auto rows = run_sweep(cfg, *param, a.values, a.policies, registry);
    const std::string prefix = output_prefix(a.out, cfg);
    write_sweep_csv(rows, *param, prefix + "sweep.csv");
    write_sweep_histogram_csv(rows, *param, prefix + "sweep_histogram.csv");
    for (const auto& row : rows) {
        out << to_string(*param) << '=' << row.value << " policy " << row.policy << ": mean response "
            << format_number(row.report.overall.response.mean.value_or(0.0)) << '\n';
    }
    out << "table: " << prefix << "sweep.csv\n";
    return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Args parsed;
    auto app = build_app(parsed);
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app->parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app->help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app->help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (app->got_subcommand("run")) return cmd_run(parsed.run, out, err);
        if (app->got_subcommand("validate")) return cmd_validate(parsed.validate, out, err);
        if (app->got_subcommand("sweep")) return cmd_sweep(parsed.sweep, out, err);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const TraceError& e) {
        err << "trace error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const PolicyFault& e) {
        err << "policy fault: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kConfigError;
}

std::vector<std::string> flag_names() {
    Args parsed;
    auto app = build_app(parsed);
    std::vector<std::string> names;
    for (const auto* sub : app->get_subcommands({})) {
        for (const auto* opt : sub->get_options()) {
            for (const auto& lname : opt->get_lnames()) {
                if (lname != "help") names.push_back(sub->get_name() + " --" + lname);
            }
        }
    }
    return names;
}

}  // namespace qsched::cli
