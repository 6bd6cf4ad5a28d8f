#include <qsched/sampling.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qsched {

double Rng::uniform_open_closed() {
    constexpr double scale = 0x1.0p-53;
    return static_cast<double>((next_u64() >> 11) + 1) * scale;
}

double exponential_from_uniform(double u, double mean) {
    const double x = -mean * std::log(u);
    return x == 0.0 ? 0.0 : x;  // fold -0.0
}

double draw_exponential(Rng& rng, double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("exponential mean must be positive");
    return exponential_from_uniform(rng.uniform_open_closed(), mean);
}

double draw_standard_normal(Rng& rng) {
    const double u1 = rng.uniform_open_closed();
    const double u2 = rng.uniform_open_closed();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double draw_service_time(Rng& rng, const TaskTypeSpec& spec, std::string_view server_type) {
    auto mean_it = spec.mean_service_time.find(std::string(server_type));
    if (mean_it == spec.mean_service_time.end()) {
        throw std::invalid_argument("task type " + spec.name + " does not support server type " +
                                    std::string(server_type));
    }
    const double mean = mean_it->second;
    if (spec.service_distribution == ServiceDistribution::Exponential) {
        // u == 1 maps to 0; redraw so service stays positive.
        for (;;) {
            const double x = draw_exponential(rng, mean);
            if (x > 0.0) return x;
        }
    }
    auto stdev_it = spec.stdev_service_time.find(mean_it->first);
    const double stdev = stdev_it == spec.stdev_service_time.end() ? 0.0 : stdev_it->second;
    for (;;) {
        const double x = mean + stdev * draw_standard_normal(rng);
        if (x > 0.0) return x;
    }
}

const TaskTypeSpec& draw_task_type(Rng& rng, const SimConfig& cfg) {
    const auto& tasks = cfg.simulation.tasks;
    if (tasks.empty()) throw std::invalid_argument("no task types configured");
    double total = 0.0;
    for (const auto& [name, spec] : tasks) total += spec.weight;
    const double target = rng.uniform_open_closed() * total;
    double cumulative = 0.0;
    for (const auto& [name, spec] : tasks) {
        cumulative += spec.weight;
        if (target <= cumulative) return spec;
    }
    return std::prev(tasks.end())->second;
}

}  // namespace qsched
