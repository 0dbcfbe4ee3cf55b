#include "feaskit/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace feaskit {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                         std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
}

inline void philox4x32_10(std::uint32_t ctr[4], std::uint32_t k0, std::uint32_t k1,
                          std::uint32_t out[4]) {
    std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    for (int round = 0; round < 10; ++round) {
        philox_round(c0, c1, c2, c3, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RandomStream::RandomStream(SeedSpec seed, std::uint64_t rep, std::uint64_t sys)
    : key0_(static_cast<std::uint32_t>(seed.master_seed)),
      key1_(static_cast<std::uint32_t>(seed.master_seed >> 32)),
      rep_lo_(static_cast<std::uint32_t>(rep)),
      rep_hi_(static_cast<std::uint32_t>(rep >> 32)),
      sys_lo_(static_cast<std::uint32_t>(sys)),
      sys_hi_(static_cast<std::uint32_t>(sys >> 32)) {
    // The block index occupies 32 bits of counter; rep and sys take the rest.
    // 2^32 blocks = 2^34 draws per stream, far beyond any procedure run.
    if (rep_hi_ != 0 || sys_hi_ != 0)
        throw std::invalid_argument("rng: rep/sys indices must fit in 32 bits");
}

void RandomStream::refill() {
    std::uint32_t ctr[4] = {static_cast<std::uint32_t>(block_),
                            static_cast<std::uint32_t>(block_ >> 32), rep_lo_, sys_lo_};
    philox4x32_10(ctr, key0_, key1_, buf_);
    ++block_;
    pos_ = 0;
}

std::uint32_t RandomStream::next_u32() {
    if (pos_ >= 4) refill();
    return buf_[pos_++];
}

std::uint64_t RandomStream::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RandomStream::next_uniform() {
    // 53-bit mantissa, shifted off zero so log() is always finite.
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

RandomStream derive_stream(SeedSpec seed, std::uint64_t rep, std::uint64_t sys) {
    return RandomStream(seed, rep, sys);
}

CovarianceSpec CovarianceSpec::diagonal(std::vector<double> variances) {
    CovarianceSpec cov;
    cov.dim_ = variances.size();
    cov.diagonal_ = true;
    cov.factor_.resize(cov.dim_);
    for (std::size_t i = 0; i < cov.dim_; ++i) {
        if (!(variances[i] > 0.0))
            throw std::invalid_argument("covariance: diagonal entries must be positive");
        cov.factor_[i] = std::sqrt(variances[i]);
    }
    return cov;
}

CovarianceSpec CovarianceSpec::dense(std::size_t dim, std::span<const double> sym) {
    if (sym.size() != dim * dim)
        throw std::invalid_argument("covariance: matrix size mismatch");
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(sym[i * dim + j] - sym[j * dim + i]) >
                1e-12 * (1.0 + std::abs(sym[i * dim + j])))
                throw std::invalid_argument("covariance: matrix not symmetric");

    CovarianceSpec cov;
    cov.dim_ = dim;
    cov.diagonal_ = false;
    cov.factor_.assign(dim * dim, 0.0);
    auto& L = cov.factor_;
    for (std::size_t j = 0; j < dim; ++j) {
        double diag = sym[j * dim + j];
        for (std::size_t p = 0; p < j; ++p) diag -= L[j * dim + p] * L[j * dim + p];
        if (!(diag > 0.0))
            throw std::invalid_argument("covariance: matrix not positive definite");
        L[j * dim + j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < dim; ++i) {
            double off = sym[i * dim + j];
            for (std::size_t p = 0; p < j; ++p) off -= L[i * dim + p] * L[j * dim + p];
            L[i * dim + j] = off / L[j * dim + j];
        }
    }
    return cov;
}

void CovarianceSpec::transform(std::span<const double> z, std::span<const double> mean,
                               std::span<double> out) const {
    if (z.size() != dim_ || mean.size() != dim_ || out.size() != dim_)
        throw std::invalid_argument("covariance: dimension mismatch");
    if (diagonal_) {
        for (std::size_t i = 0; i < dim_; ++i) out[i] = mean[i] + factor_[i] * z[i];
        return;
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        double acc = mean[i];
        for (std::size_t j = 0; j <= i; ++j) acc += factor_[i * dim_ + j] * z[j];
        out[i] = acc;
    }
}

double CovarianceSpec::factor(std::size_t r, std::size_t c) const {
    if (diagonal_) return r == c ? factor_[r] : 0.0;
    return c <= r ? factor_[r * dim_ + c] : 0.0;
}

void sample_mvn(RandomStream& stream, std::span<const double> mean,
                const CovarianceSpec& cov, std::span<double> out) {
    if (mean.size() != cov.dim() || out.size() != cov.dim())
        throw std::invalid_argument("sample_mvn: dimension mismatch");
    double zbuf[16];
    std::vector<double> zdyn;
    std::span<double> z;
    if (cov.dim() <= 16) {
        z = std::span<double>(zbuf, cov.dim());
    } else {
        zdyn.resize(cov.dim());
        z = zdyn;
    }
    for (std::size_t i = 0; i < cov.dim(); ++i) z[i] = stream.next_normal();
    cov.transform(z, mean, out);
}

PoissonTable::PoissonTable(double mean, double tail_bound) {
    if (mean < 0.0) throw std::invalid_argument("poisson: mean must be nonnegative");
    double p = std::exp(-mean);
    double cum = p;
    pmf_.push_back(p);
    cdf_.push_back(cum);
    // Recurrence p_{n} = p_{n-1} * mean / n until the tail is negligible.
    const int hard_cap = static_cast<int>(mean) + 64 + static_cast<int>(16.0 * std::sqrt(mean + 1.0));
    for (int n = 1; 1.0 - cum > tail_bound && n <= hard_cap; ++n) {
        p *= mean / n;
        cum += p;
        pmf_.push_back(p);
        cdf_.push_back(cum);
    }
    // Fold any residual tail into the last entry so sampling always lands.
    pmf_.back() += 1.0 - cdf_.back();
    cdf_.back() = 1.0;
}

int PoissonTable::sample(RandomStream& stream) const {
    const double u = stream.next_uniform();
    int lo = 0, hi = static_cast<int>(cdf_.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (cdf_[mid] < u)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

double PoissonTable::cdf(int n) const {
    if (n < 0) return 0.0;
    if (n >= static_cast<int>(cdf_.size())) return 1.0;
    return cdf_[n];
}

double PoissonTable::pmf(int n) const {
    if (n < 0 || n >= static_cast<int>(pmf_.size())) return 0.0;
    return pmf_[n];
}

}  // namespace feaskit
