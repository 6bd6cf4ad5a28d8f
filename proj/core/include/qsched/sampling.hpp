#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <qsched/config.hpp>

namespace qsched {

/// Seeded random source for one run.
///
/// Built on std::mt19937_64, whose output sequence the standard fixes. Every
/// variate below is derived from its raw 64-bit output by code in this
/// module rather than by the std distributions (whose algorithms vary by
/// library), so a seed gives the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on (0, 1] with 53 random bits.
    double uniform_open_closed();

private:
    std::mt19937_64 engine_;
};

/// -mean * ln(u). Exposed for the boundary case u == 1.
double exponential_from_uniform(double u, double mean);

/// Inverse-transform exponential draw; consumes one uniform.
/// Throws std::invalid_argument for a non-positive mean.
double draw_exponential(Rng& rng, double mean);

/// Standard normal via Box-Muller, cosine branch only; consumes two uniforms.
double draw_standard_normal(Rng& rng);

/// Service time of `spec` on `server_type`.
///
/// Normal mode redraws any result <= 0 (each retry consumes the stream
/// again); a zero stdev yields the mean exactly. Exponential mode ignores
/// the stdev. Throws std::invalid_argument for an unsupported server type.
double draw_service_time(Rng& rng, const TaskTypeSpec& spec, std::string_view server_type);

/// Weighted choice over cfg.simulation.tasks in name order; consumes one
/// uniform. Equal weights give the uniform mix. Throws std::invalid_argument
/// on an empty task map.
const TaskTypeSpec& draw_task_type(Rng& rng, const SimConfig& cfg);

}  // namespace qsched
