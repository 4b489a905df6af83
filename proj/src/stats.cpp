#include "ncce/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncce {

WilsonInterval wilson_interval(int successes, int trials, double z) {
    WilsonInterval w;
    if (trials <= 0)
        return w;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    w.lo = std::max(0.0, (center - half) / denom);
    w.hi = std::min(1.0, (center + half) / denom);
    return w;
}

double median(std::vector<double> values) {
    if (values.empty())
        return std::numeric_limits<double>::infinity();
    std::sort(values.begin(), values.end(),
              [](double a, double b) { return (std::isfinite(a) ? a : 1e300) <
                                              (std::isfinite(b) ? b : 1e300); });
    const std::size_t n = values.size();
    if (n % 2 == 1)
        return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double clamped_mean(const std::vector<double>& values, double cap) {
    if (values.empty())
        return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (double v : values)
        acc += std::isfinite(v) ? std::min(v, cap) : cap;
    return acc / static_cast<double>(values.size());
}

} // namespace ncce
