#include <qsched/exact_sum.hpp>

#include <cmath>

namespace qsched {

void ExactSum::add(double x) {
    std::size_t kept = 0;
    for (double y : partials_) {
        if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
        const double hi = x + y;
        const double lo = y - (hi - x);
        if (lo != 0.0) partials_[kept++] = lo;
        x = hi;
    }
    partials_.resize(kept);
    if (x != 0.0) partials_.push_back(x);
}

void ExactSum::add_difference(double minuend, double subtrahend) {
    // TwoSum: minuend - subtrahend == hi + lo exactly.
    const double hi = minuend - subtrahend;
    const double v = hi - minuend;
    const double lo = (minuend - (hi - v)) + (-subtrahend - v);
    add(hi);
    if (lo != 0.0) add(lo);
}

void ExactSum::merge(const ExactSum& other) {
    for (double p : other.partials_) add(p);
}

double ExactSum::value() const {
    if (partials_.empty()) return 0.0;
    // Partials are increasing in magnitude; sum from the top down and fix the
    // half-way rounding case the same way Python's math.fsum does.
    auto n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = partials_[--n];
        hi = x + y;
        const double yr = hi - x;
        lo = y - yr;
        if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

}  // namespace qsched
