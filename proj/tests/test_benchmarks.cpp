#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <vector>

#include "feaskit/benchmarks.hpp"

using namespace feaskit;

namespace {

MeanConfig paper_layout(long b_lower, long b_upper, long m, double d, long s,
                        MeanKind kind = MeanKind::scattered) {
    MeanConfig cfg;
    cfg.kind = kind;
    cfg.b_lower = b_lower;
    cfg.b_upper = b_upper;
    cfg.m = m;
    cfg.d.assign(s, d);
    return cfg;
}

}  // namespace

TEST_CASE("scattered means by block") {
    const auto means = build_means(paper_layout(33, 66, 2, 0.5, 4), 99, 4);
    // First block: all constraints at -(b_lower - i + 1) d.
    for (long l = 0; l < 4; ++l) CHECK(means[0][l] == doctest::Approx(-16.5));
    CHECK(means[32][0] == doctest::Approx(-0.5));
    // Middle block: m feasible then s - m infeasible constraints.
    const auto middle = build_means(paper_layout(33, 66, 2, 0.02, 4), 99, 4);
    CHECK(middle[33][0] == doctest::Approx(-0.02));
    CHECK(middle[33][1] == doctest::Approx(-0.02));
    CHECK(middle[33][2] == doctest::Approx(0.02));
    CHECK(middle[33][3] == doctest::Approx(0.02));
    // Last block: +(i - b_upper) d everywhere.
    CHECK(middle[66][0] == doctest::Approx(0.02));
    CHECK(middle[98][3] == doctest::Approx(0.02 * 33));
}

TEST_CASE("concentrated means sit on the slippage boundary when d equals eps") {
    const double eps = 0.02;
    const auto means =
        build_means(paper_layout(1, 1, 0, eps, 1, MeanKind::concentrated), 1, 1);
    CHECK(means[0][0] == doctest::Approx(-eps));

    const auto multi =
        build_means(paper_layout(2, 4, 1, eps, 2, MeanKind::concentrated), 6, 2);
    CHECK(multi[0][0] == -eps);
    CHECK(multi[2][0] == -eps);  // middle block, feasible constraint
    CHECK(multi[2][1] == eps);   // middle block, infeasible constraint
    CHECK(multi[5][0] == eps);
    CHECK(multi[5][1] == eps);
}

TEST_CASE("mean config validation") {
    CHECK_THROWS_AS(build_means(paper_layout(5, 3, 0, 0.1, 1), 6, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_means(paper_layout(1, 3, 4, 0.1, 2), 6, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_means(paper_layout(1, 3, 0, -0.1, 1), 6, 1), std::invalid_argument);
}

TEST_CASE("acceptable-system counts") {
    const std::vector<double> eps = {0.02};
    // Blocks of the reference layout all have >= 3 systems.
    auto cfg = paper_layout(33, 66, 0, 0.005, 1);
    CHECK(count_acceptable(cfg, 99, eps) == std::vector<long>{9});
    cfg.d = {0.01};
    CHECK(count_acceptable(cfg, 99, eps) == std::vector<long>{3});
    cfg.d = {0.02};
    CHECK(count_acceptable(cfg, 99, eps) == std::vector<long>{0});
    cfg.d = {0.5};
    CHECK(count_acceptable(cfg, 99, eps) == std::vector<long>{0});
    cfg.d = {0.0};
    CHECK(count_acceptable(cfg, 99, eps) == std::vector<long>{99});
    // Block sizes clip the per-block contribution.
    cfg = paper_layout(1, 2, 0, 0.005, 1);
    CHECK(count_acceptable(cfg, 3, eps) == std::vector<long>{3});
}

TEST_CASE("variance layouts average to sigma2") {
    const long k = 99, s = 4;
    for (VarianceKind kind :
         {VarianceKind::constant, VarianceKind::increasing_constraint,
          VarianceKind::decreasing_constraint, VarianceKind::increasing_system,
          VarianceKind::decreasing_system}) {
        const VarianceConfig cfg{kind, 1.7};
        for (long i = 0; i < k; ++i)
            for (long l = 0; l < s; ++l) CHECK(variance_at(cfg, i, l, k, s) > 0.0);

        // Average over the varying index.
        if (kind == VarianceKind::increasing_constraint ||
            kind == VarianceKind::decreasing_constraint) {
            double sum = 0.0;
            for (long l = 0; l < s; ++l) sum += variance_at(cfg, 0, l, k, s);
            CHECK(sum / s == doctest::Approx(1.7).epsilon(1e-12));
        } else {
            double sum = 0.0;
            for (long i = 0; i < k; ++i) sum += variance_at(cfg, i, 0, k, s);
            CHECK(sum / k == doctest::Approx(1.7).epsilon(1e-12));
        }
    }
    const VarianceConfig ivc{VarianceKind::increasing_constraint, 1.0};
    CHECK(variance_at(ivc, 0, 0, 99, 4) == doctest::Approx(2.0 / 5.0));
    const VarianceConfig dvs{VarianceKind::decreasing_system, 1.0};
    CHECK(variance_at(dvs, 0, 0, 99, 4) == doctest::Approx(2.0 * 99.0 / 100.0));
}

TEST_CASE("block boundaries map onto truth classes when d >= eps") {
    ProblemSpec spec;
    spec.k = 99;
    spec.s = 4;
    spec.q.assign(4, 0.0);
    spec.eps.assign(4, 0.02);
    const auto truth = synthetic_truth(spec, paper_layout(33, 66, 2, 0.5, 4));
    long desirable = 0, unacceptable = 0;
    for (auto cls : truth) {
        if (cls == SystemClass::desirable) ++desirable;
        if (cls == SystemClass::unacceptable) ++unacceptable;
    }
    CHECK(desirable == 33);
    CHECK(unacceptable == 99 - 33);  // partially feasible systems violate a constraint
}

TEST_CASE("macro runner is deterministic and worker-count independent") {
    ProblemSpec spec;
    spec.k = 4;
    spec.s = 2;
    spec.q = {0.0, 0.0};
    spec.eps = {0.05, 0.05};
    spec.alpha = 0.05;
    spec.c = 1;
    spec.independent = false;
    const auto mean_cfg = paper_layout(1, 2, 1, 0.3, 2);
    const VarianceConfig var_cfg{VarianceKind::constant, 1.0};

    const auto a = run_experiment(ProcedurePlan::izr(10, 2.0), spec, mean_cfg, var_cfg, 60,
                                  SeedSpec{404}, 1);
    const auto b = run_experiment(ProcedurePlan::izr(10, 2.0), spec, mean_cfg, var_cfg, 60,
                                  SeedSpec{404}, 4);
    CHECK(a.obs_mean == b.obs_mean);
    CHECK(a.obs_se == b.obs_se);
    CHECK(a.pcd == b.pcd);
    CHECK(a.pcd_lo == b.pcd_lo);
    CHECK(a.pcd_hi == b.pcd_hi);

    const auto c = run_experiment(ProcedurePlan::izr(10, 2.0), spec, mean_cfg, var_cfg, 60,
                                  SeedSpec{405}, 1);
    CHECK(a.obs_mean != c.obs_mean);
}

TEST_CASE("single-replication stats flag the undefined standard error") {
    ProblemSpec spec;
    spec.k = 1;
    spec.s = 1;
    spec.q = {0.0};
    spec.eps = {0.02};
    spec.alpha = 0.05;
    spec.c = 1;

    std::vector<SystemClass> truth = {SystemClass::desirable};
    SourceFactory factory = [](std::uint64_t) {
        return std::make_unique<ConstantSource>(
            std::vector<std::vector<double>>{{-0.5}});
    };
    const auto stats = run_macro(ProcedurePlan::fb(5), spec, truth, factory, 1, 1);
    CHECK(stats.pcd == 1.0);
    CHECK(std::isnan(stats.obs_se));
    CHECK(stats.obs_mean == 5.0);
}

TEST_CASE("summaries report ratios against the baseline row") {
    MacroStats fb;
    fb.obs_mean = 259.0;
    MacroStats ize;
    ize.obs_mean = 82.0;
    const auto rows = summarize({"FB", "IZE"}, {fb, ize}, 0);
    CHECK(rows[0].obs_ratio == doctest::Approx(1.0));
    CHECK(rows[1].obs_ratio == doctest::Approx(82.0 / 259.0));

    const auto equal = summarize({"a", "b"}, {fb, fb}, 0);
    CHECK(equal[0].obs_ratio == equal[1].obs_ratio);
    CHECK_THROWS_AS(summarize({}, {}, 0), std::invalid_argument);
}

TEST_CASE("difficulty ordering of estimated pcd on a small scattered grid") {
    ProblemSpec spec;
    spec.k = 5;
    spec.s = 1;
    spec.q = {0.0};
    spec.eps = {0.02};
    spec.alpha = 0.05;
    spec.c = 1;
    spec.independent = false;
    const VarianceConfig var_cfg{VarianceKind::constant, 1.0};

    const auto hard = run_experiment(ProcedurePlan::fb(20), spec,
                                     paper_layout(2, 3, 0, 0.02, 1), var_cfg, 150,
                                     SeedSpec{7}, 1);
    const auto easy = run_experiment(ProcedurePlan::fb(20), spec,
                                     paper_layout(2, 3, 0, 1.0, 1), var_cfg, 150,
                                     SeedSpec{7}, 1);
    const double half_width = (hard.pcd_hi - hard.pcd_lo) / 2.0;
    CHECK(easy.pcd >= hard.pcd - 2.0 * half_width);
    CHECK(easy.obs_mean < hard.obs_mean);
}
