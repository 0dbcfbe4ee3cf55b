#pragma once

#include <span>

namespace feaskit {

struct VarianceEstimate {
    double value = 0.0;  // S^2, nonnegative
    long dof = 0;        // degrees of freedom, >= 1
};

/// Welford running moments; numerically stable for large sample counts.
class RunningMoments {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    long count() const { return n_; }
    double mean() const { return mean_; }
    VarianceEstimate variance() const;

private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Unbiased sample variance (n-1 denominator). Requires at least two points.
VarianceEstimate sample_variance(std::span<const double> data);

/// Combines a pilot-sample variance (n0p points) with a monitored-sample
/// variance (n0pp points, 0 or >= 2) into one estimate:
///   [(n0p-1) S'^2 + (n0pp-1) S''^2] / (n0p + n0pp - 2)   when n0pp >= 2
///   S'^2                                                  when n0pp == 0
VarianceEstimate pooled_variance(VarianceEstimate sp2, VarianceEstimate spp2, long n0p,
                                 long n0pp);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion. Stays inside [0, 1] even
/// when the estimate sits at an endpoint.
Interval wilson_interval(long successes, long trials, double z = 1.959963984540054);

}  // namespace feaskit
