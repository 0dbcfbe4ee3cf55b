#pragma once

#include <memory>
#include <span>
#include <vector>

#include "feaskit/rng.hpp"

namespace feaskit {

/// Generator of performance observations. Successive calls for the same
/// system yield iid s-vectors within one replication. Implementations own one
/// stream per system so the draw order across systems never matters.
class ObservationSource {
public:
    virtual ~ObservationSource() = default;

    /// Fills `out` with the next observation vector for `system`.
    virtual void next(long system, std::span<double> out) = 0;

    virtual long systems() const = 0;
    virtual long measures() const = 0;
};

/// Multivariate-normal synthetic source with per-system mean and covariance.
class MvnSource : public ObservationSource {
public:
    MvnSource(std::vector<std::vector<double>> means, std::vector<CovarianceSpec> covariances,
              SeedSpec seed, std::uint64_t rep);

    void next(long system, std::span<double> out) override;
    long systems() const override { return static_cast<long>(means_.size()); }
    long measures() const override { return s_; }

private:
    std::vector<std::vector<double>> means_;
    std::vector<CovarianceSpec> covariances_;
    std::vector<RandomStream> streams_;
    long s_ = 0;
};

/// Deterministic source that always returns the given mean vectors. Used to
/// exercise the degenerate zero-variance paths.
class ConstantSource : public ObservationSource {
public:
    explicit ConstantSource(std::vector<std::vector<double>> values);

    void next(long system, std::span<double> out) override;
    long systems() const override { return static_cast<long>(values_.size()); }
    long measures() const override { return s_; }

private:
    std::vector<std::vector<double>> values_;
    long s_ = 0;
};

}  // namespace feaskit
