#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace feaskit {

/// Master seed plus the (replication, system) derivation path used to key
/// independent observation streams.
struct SeedSpec {
    std::uint64_t master_seed = 0;
};

/// Counter-based random stream (Philox4x32-10, Salmon et al. 2011).
///
/// The 128-bit counter is laid out as (block_lo, block_hi, rep, sys), so the
/// draw sequence for a given (seed, rep, sys) is a pure function of those
/// arguments and streams with distinct (rep, sys) never share counter space.
/// Safe for concurrent use across replication workers: each worker owns its
/// streams and no state is shared.
class RandomStream {
public:
    RandomStream(SeedSpec seed, std::uint64_t rep, std::uint64_t sys);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform draw on the open interval (0, 1), 53-bit resolution.
    double next_uniform();

    /// Standard normal draw (Box-Muller; pairs are cached).
    double next_normal();

private:
    void refill();

    std::uint32_t key0_, key1_;
    std::uint32_t rep_lo_, rep_hi_;
    std::uint32_t sys_lo_, sys_hi_;
    std::uint64_t block_ = 0;
    std::uint32_t buf_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

RandomStream derive_stream(SeedSpec seed, std::uint64_t rep, std::uint64_t sys);

/// Symmetric positive definite covariance with its cached lower Cholesky
/// factor. The diagonal case keeps only the per-component standard deviations.
class CovarianceSpec {
public:
    static CovarianceSpec diagonal(std::vector<double> variances);
    static CovarianceSpec dense(std::size_t dim, std::span<const double> sym_row_major);

    std::size_t dim() const { return dim_; }
    bool is_diagonal() const { return diagonal_; }

    /// out = mean + L * z
    void transform(std::span<const double> z, std::span<const double> mean,
                   std::span<double> out) const;

    /// Lower-triangular factor entry (row r, column c).
    double factor(std::size_t r, std::size_t c) const;

private:
    std::size_t dim_ = 0;
    bool diagonal_ = true;
    std::vector<double> factor_;  // diagonal: sqrt(var); dense: row-major lower triangle
};

/// Draws one s-vector: mean + L z with z iid standard normal from the stream.
void sample_mvn(RandomStream& stream, std::span<const double> mean,
                const CovarianceSpec& cov, std::span<double> out);

/// Inverse-transform sampler for a fixed-mean Poisson distribution.
/// The support is truncated where the remaining tail mass drops below
/// `tail_bound`; the residual mass is lumped onto the last table entry.
class PoissonTable {
public:
    explicit PoissonTable(double mean, double tail_bound = 1e-15);

    int sample(RandomStream& stream) const;
    int max_value() const { return static_cast<int>(cdf_.size()) - 1; }

    /// P(X <= n); exact up to the truncation point, 1 beyond it.
    double cdf(int n) const;
    /// P(X = n); 0 beyond the truncation point.
    double pmf(int n) const;
    /// P(X > n).
    double tail(int n) const { return 1.0 - cdf(n); }

private:
    std::vector<double> cdf_;
    std::vector<double> pmf_;
};

}  // namespace feaskit
