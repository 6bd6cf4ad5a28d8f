#pragma once

#include <vector>

namespace qsched {

/// Order-independent floating-point accumulator.
///
/// Keeps a list of non-overlapping partials (Shewchuk's algorithm) so the
/// running total is held exactly; value() rounds it once. Two accumulators
/// fed the same multiset of doubles report bit-identical values no matter the
/// insertion order, which is what the busy-time and queue-occupancy
/// conservation checks rely on.
class ExactSum {
public:
    void add(double x);

    /// Adds `minuend - subtrahend` without rounding the difference first.
    void add_difference(double minuend, double subtrahend);

    void merge(const ExactSum& other);

    /// Correctly rounded total.
    double value() const;

    bool empty() const { return partials_.empty(); }

private:
    std::vector<double> partials_;
};

}  // namespace qsched
