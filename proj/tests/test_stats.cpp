#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <vector>

#include "feaskit/rng.hpp"
#include "feaskit/stats.hpp"

using namespace feaskit;

TEST_CASE("sample variance basics") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    auto est = sample_variance(a);
    CHECK(est.value == doctest::Approx(1.0));
    CHECK(est.dof == 2);

    const std::vector<double> b = {5.0, 5.0, 5.0, 5.0};
    est = sample_variance(b);
    CHECK(est.value == doctest::Approx(0.0));
    CHECK(est.dof == 3);

    const std::vector<double> c = {0.0, 2.0};
    est = sample_variance(c);
    CHECK(est.value == doctest::Approx(2.0));
    CHECK(est.dof == 1);

    const std::vector<double> single = {1.0};
    CHECK_THROWS_AS(sample_variance(single), std::invalid_argument);
}

TEST_CASE("sample variance is translation invariant") {
    RandomStream stream(SeedSpec{31}, 0, 0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> data(50), shifted(50);
        const double shift = 1000.0 * stream.next_normal();
        for (int i = 0; i < 50; ++i) {
            data[i] = stream.next_normal();
            shifted[i] = data[i] + shift;
        }
        const double v0 = sample_variance(data).value;
        const double v1 = sample_variance(shifted).value;
        CHECK(std::abs(v1 - v0) <= 1e-12 * std::max(1.0, std::abs(v0)) + 1e-12);
    }
}

TEST_CASE("pooled variance follows the two-sample formula") {
    auto est = pooled_variance({2.0, 14}, {2.0, 4}, 15, 5);
    CHECK(est.value == doctest::Approx(2.0));
    CHECK(est.dof == 18);

    est = pooled_variance({4.0, 2}, {0.0, 2}, 3, 3);
    CHECK(est.value == doctest::Approx(2.0));
    CHECK(est.dof == 4);

    est = pooled_variance({3.0, 9}, {0.0, 0}, 10, 0);
    CHECK(est.value == doctest::Approx(3.0));
    CHECK(est.dof == 9);

    CHECK_THROWS_AS(pooled_variance({1.0, 1}, {1.0, 0}, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(pooled_variance({1.0, 0}, {1.0, 1}, 1, 2), std::invalid_argument);
}

TEST_CASE("pooled variance with equal components returns the component") {
    RandomStream stream(SeedSpec{32}, 0, 0);
    for (int rep = 0; rep < 30; ++rep) {
        const long n0p = 2 + stream.next_u32() % 30;
        long n0pp = stream.next_u32() % 30;
        if (n0pp == 1) n0pp = 0;
        const double value = 5.0 * stream.next_uniform();
        const auto est = pooled_variance({value, n0p - 1}, {value, n0pp - 1}, n0p, n0pp);
        CHECK(est.value == doctest::Approx(value));
        CHECK(est.dof == (n0pp == 0 ? n0p - 1 : n0p + n0pp - 2));
    }
}

TEST_CASE("welford moments agree with the direct formula") {
    RandomStream stream(SeedSpec{33}, 0, 0);
    RunningMoments moments;
    std::vector<double> data;
    for (int i = 0; i < 200; ++i) {
        const double x = 3.0 + 2.0 * stream.next_normal();
        moments.add(x);
        data.push_back(x);
    }
    CHECK(moments.variance().value == doctest::Approx(sample_variance(data).value));
    CHECK(moments.count() == 200);
}

TEST_CASE("wilson interval brackets the estimate and stays in [0,1]") {
    auto ci = wilson_interval(1900, 2000);
    CHECK(ci.lo < 0.95);
    CHECK(ci.hi > 0.95);
    CHECK(ci.lo > 0.0);
    CHECK(ci.hi < 1.0);

    ci = wilson_interval(2000, 2000);
    CHECK(ci.hi == doctest::Approx(1.0));
    CHECK(ci.lo > 0.99);

    ci = wilson_interval(0, 2000);
    CHECK(ci.lo == doctest::Approx(0.0));
    CHECK_THROWS_AS(wilson_interval(3, 2), std::invalid_argument);
}
