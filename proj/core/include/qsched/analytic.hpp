#pragma once

#include <cstdint>

namespace qsched::analytic {

/// An M/M/k queue: Poisson arrivals at `lambda`, k servers each serving at
/// exponential rate `mu`.
struct MmkParams {
    std::uint32_t k = 1;
    double lambda = 0.0;
    double mu = 1.0;

    double offered_load() const { return lambda / mu; }
    /// Per-server utilization lambda / (k mu).
    double rho() const { return lambda / (static_cast<double>(k) * mu); }

    /// Parameters for a target utilization with mean service time `mean_service`.
    static MmkParams at_utilization(std::uint32_t k, double rho, double mean_service);
};

/// Probability an arrival has to wait (Erlang C).
///
/// Evaluated through the Erlang B recurrence B(n) = a B(n-1) / (n + a B(n-1)),
/// then C = k B / (k - a (1 - B)); no factorials, stable for large k.
/// Throws std::domain_error unless k >= 1, lambda >= 0, mu > 0 and rho < 1.
double erlang_c(const MmkParams& params);

/// Steady-state mean time in queue, C / (k mu - lambda).
double mmk_mean_wait(const MmkParams& params);

/// |simulated - analytical| / analytical; throws std::domain_error when the
/// analytical value is not positive.
double relative_error(double simulated, double analytical);

struct ErrorSample {
    double simulated_wait = 0.0;
    double analytical_wait = 0.0;
    double relative_error = 0.0;
};

ErrorSample compare_wait(double simulated_wait, const MmkParams& params);

}  // namespace qsched::analytic
