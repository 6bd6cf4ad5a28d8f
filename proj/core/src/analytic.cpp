#include <qsched/analytic.hpp>

#include <cmath>
#include <stdexcept>

namespace qsched::analytic {

namespace {

void check_stable(const MmkParams& p) {
    if (p.k == 0) throw std::domain_error("M/M/k needs at least one server");
    if (!(p.mu > 0.0)) throw std::domain_error("service rate must be positive");
    if (!(p.lambda >= 0.0)) throw std::domain_error("arrival rate must be non-negative");
    if (!(p.rho() < 1.0)) throw std::domain_error("unstable system: utilization must be below 1");
}

}  // namespace

MmkParams MmkParams::at_utilization(std::uint32_t k, double rho, double mean_service) {
    if (!(mean_service > 0.0)) throw std::domain_error("mean service time must be positive");
    MmkParams p;
    p.k = k;
    p.mu = 1.0 / mean_service;
    p.lambda = rho * static_cast<double>(k) * p.mu;
    return p;
}

double erlang_c(const MmkParams& params) {
    check_stable(params);
    const double a = params.offered_load();
    double b = 1.0;
    for (std::uint32_t n = 1; n <= params.k; ++n) b = a * b / (static_cast<double>(n) + a * b);
    const double k = static_cast<double>(params.k);
    return k * b / (k - a * (1.0 - b));
}

double mmk_mean_wait(const MmkParams& params) {
    const double c = erlang_c(params);
    return c / (static_cast<double>(params.k) * params.mu - params.lambda);
}

double relative_error(double simulated, double analytical) {
    if (!(analytical > 0.0)) throw std::domain_error("relative error undefined for a non-positive reference");
    return std::fabs(simulated - analytical) / analytical;
}

ErrorSample compare_wait(double simulated_wait, const MmkParams& params) {
    const double analytical = mmk_mean_wait(params);
    return {simulated_wait, analytical, relative_error(simulated_wait, analytical)};
}

}  // namespace qsched::analytic
