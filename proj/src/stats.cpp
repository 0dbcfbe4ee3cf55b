#include "feaskit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace feaskit {

VarianceEstimate RunningMoments::variance() const {
    if (n_ < 2) throw std::invalid_argument("variance requires at least two points");
    return {std::max(0.0, m2_ / static_cast<double>(n_ - 1)), n_ - 1};
}

VarianceEstimate sample_variance(std::span<const double> data) {
    RunningMoments moments;
    for (double x : data) moments.add(x);
    return moments.variance();
}

VarianceEstimate pooled_variance(VarianceEstimate sp2, VarianceEstimate spp2, long n0p,
                                 long n0pp) {
    if (n0p < 2) throw std::invalid_argument("pooled_variance: pilot count must be >= 2");
    if (n0pp == 1) throw std::invalid_argument("pooled_variance: monitored count of 1 is invalid");
    if (n0pp < 0) throw std::invalid_argument("pooled_variance: negative count");
    if (n0pp == 0) return {sp2.value, n0p - 1};
    const long dof = n0p + n0pp - 2;
    const double value = (static_cast<double>(n0p - 1) * sp2.value +
                          static_cast<double>(n0pp - 1) * spp2.value) /
                         static_cast<double>(dof);
    return {value, dof};
}

Interval wilson_interval(long successes, long trials, double z) {
    if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be positive");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: successes out of range");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace feaskit
