#pragma once

#include <vector>

namespace ncce {

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (default 95%).
WilsonInterval wilson_interval(int successes, int trials,
                               double z = 1.959963984540054);

/// Median of a sample; non-finite values sort high. Returns +inf for an
/// empty sample.
double median(std::vector<double> values);

/// Mean with each value clamped to cap, so occasional degenerate trials
/// (infinite loss) keep sweep averages finite.
double clamped_mean(const std::vector<double>& values, double cap);

} // namespace ncce
