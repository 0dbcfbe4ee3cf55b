#include <doctest.h>

#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <vector>

#include "feaskit/rng.hpp"

using namespace feaskit;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided Kolmogorov-Smirnov p-value against the standard normal.
double ks_pvalue_normal(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double cdf = normal_cdf(sample[i]);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int j = 1; j <= 100; ++j)
        p += 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
    // Random123 kat_vectors, philox4x32-10 with zero counter and key.
    RandomStream zero(SeedSpec{0}, 0, 0);
    CHECK(zero.next_u32() == 0x6627e8d5u);
    CHECK(zero.next_u32() == 0xe169c58du);
    CHECK(zero.next_u32() == 0xbc57ac4cu);
    CHECK(zero.next_u32() == 0x9b00dbd8u);
}

TEST_CASE("stream is a pure function of (seed, rep, sys)") {
    RandomStream a(SeedSpec{7}, 0, 0);
    RandomStream b(SeedSpec{7}, 0, 0);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct derivation paths give distinct sequences") {
    RandomStream a(SeedSpec{7}, 0, 0);
    RandomStream b(SeedSpec{7}, 0, 1);
    RandomStream c(SeedSpec{7}, 1, 0);
    int differs_ab = 0, differs_ac = 0;
    for (int i = 0; i < 16; ++i) {
        const auto va = a.next_u32();
        if (va != b.next_u32()) ++differs_ab;
        if (va != c.next_u32()) ++differs_ac;
    }
    CHECK(differs_ab > 0);
    CHECK(differs_ac > 0);
}

TEST_CASE("normal draws satisfy the CLT bound") {
    RandomStream stream(SeedSpec{2024}, 0, 0);
    const long n = 1000000;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += stream.next_normal();
    CHECK(std::abs(sum / static_cast<double>(n)) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform draws stay inside the open unit interval") {
    RandomStream stream(SeedSpec{11}, 3, 5);
    for (int i = 0; i < 10000; ++i) {
        const double u = stream.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("mvn identity covariance has standard normal marginals") {
    const auto cov = CovarianceSpec::diagonal({1.0, 1.0});
    RandomStream stream(SeedSpec{5}, 0, 0);
    const std::vector<double> mean = {0.0, 0.0};
    std::vector<double> first, second, out(2);
    const int n = 100000;
    first.reserve(n);
    second.reserve(n);
    for (int i = 0; i < n; ++i) {
        sample_mvn(stream, mean, cov, out);
        first.push_back(out[0]);
        second.push_back(out[1]);
    }
    CHECK(ks_pvalue_normal(std::move(first)) > 0.001);
    CHECK(ks_pvalue_normal(std::move(second)) > 0.001);
}

TEST_CASE("mvn dense covariance reproduces the requested correlation") {
    const std::vector<double> sigma = {1.0, 0.5, 0.5, 1.0};
    const auto cov = CovarianceSpec::dense(2, sigma);
    RandomStream stream(SeedSpec{6}, 0, 0);
    const std::vector<double> mean = {0.0, 0.0};
    std::vector<double> out(2);
    const int n = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sample_mvn(stream, mean, cov, out);
        sx += out[0];
        sy += out[1];
        sxx += out[0] * out[0];
        syy += out[1] * out[1];
        sxy += out[0] * out[1];
    }
    const double mx = sx / n, my = sy / n;
    const double corr = (sxy / n - mx * my) /
                        std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
    CHECK(std::abs(corr - 0.5) < 0.02);
}

TEST_CASE("degenerate covariance is rejected") {
    CHECK_THROWS_AS(CovarianceSpec::diagonal({1.0, 0.0}), std::invalid_argument);
    const std::vector<double> not_pd = {1.0, 2.0, 2.0, 1.0};
    CHECK_THROWS_AS(CovarianceSpec::dense(2, not_pd), std::invalid_argument);
}

TEST_CASE("mvn dimension mismatch is rejected") {
    const auto cov = CovarianceSpec::diagonal({1.0, 1.0});
    RandomStream stream(SeedSpec{1}, 0, 0);
    const std::vector<double> mean = {0.0, 0.0, 0.0};
    std::vector<double> out(3);
    CHECK_THROWS_AS(sample_mvn(stream, mean, cov, out), std::invalid_argument);
}

TEST_CASE("cholesky factor round-trips random SPD matrices") {
    RandomStream stream(SeedSpec{99}, 0, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t dim = 1 + static_cast<std::size_t>(stream.next_u32() % 8);
        // A = M M^T + I is symmetric positive definite.
        std::vector<double> m(dim * dim);
        for (auto& v : m) v = stream.next_normal();
        std::vector<double> a(dim * dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                double acc = (i == j) ? 1.0 : 0.0;
                for (std::size_t p = 0; p < dim; ++p) acc += m[i * dim + p] * m[j * dim + p];
                a[i * dim + j] = acc;
            }
        const auto cov = CovarianceSpec::dense(dim, a);
        double worst = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                double acc = 0.0;
                for (std::size_t p = 0; p < dim; ++p) acc += cov.factor(i, p) * cov.factor(j, p);
                worst = std::max(worst, std::abs(acc - a[i * dim + j]));
            }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("poisson table sampling matches its mean") {
    const PoissonTable table(25.0);
    RandomStream stream(SeedSpec{123}, 0, 0);
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += table.sample(stream);
    CHECK(std::abs(sum / n - 25.0) < 4.0 * 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(table.cdf(table.max_value()) == doctest::Approx(1.0));
}

TEST_CASE("poisson table with zero mean is a point mass") {
    const PoissonTable table(0.0);
    RandomStream stream(SeedSpec{1}, 0, 0);
    for (int i = 0; i < 100; ++i) CHECK(table.sample(stream) == 0);
}
