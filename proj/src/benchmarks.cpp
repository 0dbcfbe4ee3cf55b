#include "feaskit/benchmarks.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "feaskit/stats.hpp"

namespace feaskit {

namespace {

void validate_mean_config(const MeanConfig& cfg, long k, long s) {
    if (cfg.b_lower < 0 || cfg.b_lower > cfg.b_upper || cfg.b_upper > k)
        throw std::invalid_argument("means: need 0 <= b_lower <= b_upper <= k");
    if (cfg.m < 0 || cfg.m > s)
        throw std::invalid_argument("means: need 0 <= m <= s");
    if (static_cast<long>(cfg.d.size()) != s)
        throw std::invalid_argument("means: one separation per constraint required");
    for (double d : cfg.d)
        if (d < 0.0) throw std::invalid_argument("means: separations must be nonnegative");
}

}  // namespace

std::vector<std::vector<double>> build_means(const MeanConfig& cfg, long k, long s) {
    validate_mean_config(cfg, k, s);
    std::vector<std::vector<double>> means(k, std::vector<double>(s, 0.0));
    for (long i = 1; i <= k; ++i) {
        for (long l = 1; l <= s; ++l) {
            const double d = cfg.d[l - 1];
            double value = 0.0;
            if (cfg.kind == MeanKind::concentrated) {
                if (i <= cfg.b_lower)
                    value = -d;
                else if (i <= cfg.b_upper)
                    value = (l <= cfg.m) ? -d : d;
                else
                    value = d;
            } else {
                if (i <= cfg.b_lower)
                    value = -static_cast<double>(cfg.b_lower - i + 1) * d;
                else if (i <= cfg.b_upper)
                    value = (l <= cfg.m) ? -static_cast<double>(i - cfg.b_lower) * d
                                         : static_cast<double>(i - cfg.b_lower) * d;
                else
                    value = static_cast<double>(i - cfg.b_upper) * d;
            }
            means[i - 1][l - 1] = value;
        }
    }
    return means;
}

std::vector<long> count_acceptable(const MeanConfig& cfg, long k,
                                   std::span<const double> eps) {
    const long s = static_cast<long>(eps.size());
    validate_mean_config(cfg, k, s);
    std::vector<long> counts(s, 0);
    const long blocks[3] = {cfg.b_lower, cfg.b_upper - cfg.b_lower, k - cfg.b_upper};
    for (long l = 0; l < s; ++l) {
        const double d = cfg.d[l];
        if (d == 0.0) {
            counts[l] = k;
            continue;
        }
        if (d >= eps[l]) {
            counts[l] = 0;
            continue;
        }
        // Number of offsets j*d strictly inside the zone, guarded against a
        // ratio that is an exact integer up to rounding.
        const long per_block =
            static_cast<long>(std::ceil(eps[l] / d - 1e-9)) - 1;
        long total = 0;
        for (long b : blocks) total += std::min(per_block, b);
        counts[l] = total;
    }
    return counts;
}

double variance_at(const VarianceConfig& cfg, long i, long l, long k, long s) {
    switch (cfg.kind) {
        case VarianceKind::constant:
            return cfg.sigma2;
        case VarianceKind::increasing_constraint:
            return 2.0 * static_cast<double>(l + 1) / static_cast<double>(s + 1) * cfg.sigma2;
        case VarianceKind::decreasing_constraint:
            return 2.0 * static_cast<double>(s - l) / static_cast<double>(s + 1) * cfg.sigma2;
        case VarianceKind::increasing_system:
            return 2.0 * static_cast<double>(i + 1) / static_cast<double>(k + 1) * cfg.sigma2;
        case VarianceKind::decreasing_system:
            return 2.0 * static_cast<double>(k - i) / static_cast<double>(k + 1) * cfg.sigma2;
    }
    throw std::logic_error("variance_at: unknown kind");
}

ProcedurePlan ProcedurePlan::fb(long n0) {
    ProcedurePlan plan;
    plan.kind = Kind::fb;
    plan.label = "FB";
    plan.n0 = n0;
    return plan;
}

ProcedurePlan ProcedurePlan::izr(long n0, double xi, int levels) {
    ProcedurePlan plan;
    plan.kind = Kind::izr;
    plan.label = "IZR(xi=" + std::to_string(static_cast<int>(xi)) + ")";
    plan.n0 = n0;
    plan.xi = xi;
    plan.ladder_levels = levels;
    return plan;
}

ProcedurePlan ProcedurePlan::ize(long n0_prime, long n0_double_prime, double nu) {
    ProcedurePlan plan;
    plan.kind = Kind::ize;
    plan.label = "IZE";
    plan.n0_prime = n0_prime;
    plan.n0_double_prime = n0_double_prime;
    plan.nu = nu;
    return plan;
}

ProcedureResult run_plan(const ProcedurePlan& plan, const ProblemSpec& spec,
                         ObservationSource& source) {
    switch (plan.kind) {
        case ProcedurePlan::Kind::fb:
            return run_fb(spec, plan.n0, source);
        case ProcedurePlan::Kind::izr: {
            if (!plan.explicit_ladders.empty())
                return run_izr(spec, plan.explicit_ladders, plan.n0, source);
            std::vector<ToleranceLadder> ladders;
            ladders.reserve(spec.s);
            for (long l = 0; l < spec.s; ++l)
                ladders.push_back(geometric_ladder(spec.eps[l], plan.xi, plan.ladder_levels));
            return run_izr(spec, ladders, plan.n0, source);
        }
        case ProcedurePlan::Kind::ize:
            return run_ize(spec, plan.n0_prime, plan.n0_double_prime, plan.nu, source);
    }
    throw std::logic_error("run_plan: unknown procedure kind");
}

MacroStats run_macro(const ProcedurePlan& plan, const ProblemSpec& spec,
                     std::span<const SystemClass> truth, const SourceFactory& factory,
                     long reps, int workers) {
    if (reps < 1) throw std::invalid_argument("run_macro: reps must be >= 1");
    if (workers < 1) workers = 1;
    const auto start = std::chrono::steady_clock::now();

    std::vector<long long> obs(reps, 0);
    std::vector<char> correct(reps, 0);
    std::atomic<long> next_rep{0};
    std::mutex error_mutex;
    std::string error_message;

    auto run_range = [&]() {
        for (;;) {
            const long rep = next_rep.fetch_add(1);
            if (rep >= reps) break;
            try {
                auto source = factory(static_cast<std::uint64_t>(rep));
                const ProcedureResult result = run_plan(plan, spec, *source);
                obs[rep] = result.total_observations;
                correct[rep] = is_correct_decision(truth, result) ? 1 : 0;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (error_message.empty())
                    error_message = "replication " + std::to_string(rep) + ": " + e.what();
                next_rep.store(reps);
                break;
            }
        }
    };

    if (workers == 1) {
        run_range();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(run_range);
        for (auto& t : pool) t.join();
    }
    if (!error_message.empty())
        throw std::runtime_error("experiment aborted: " + error_message);

    // Reduce in replication order so results never depend on scheduling.
    long long obs_sum = 0;
    unsigned __int128 obs_sumsq = 0;
    long correct_count = 0;
    for (long rep = 0; rep < reps; ++rep) {
        obs_sum += obs[rep];
        obs_sumsq += static_cast<unsigned __int128>(obs[rep]) *
                     static_cast<unsigned __int128>(obs[rep]);
        correct_count += correct[rep];
    }

    MacroStats stats;
    stats.reps = reps;
    const double n = static_cast<double>(reps);
    stats.obs_mean = static_cast<double>(obs_sum) / n;
    if (reps >= 2) {
        const double sumsq = static_cast<double>(obs_sumsq);
        const double var = (sumsq - n * stats.obs_mean * stats.obs_mean) / (n - 1.0);
        stats.obs_se = std::sqrt(std::max(0.0, var) / n);
    } else {
        stats.obs_se = std::numeric_limits<double>::quiet_NaN();
    }
    stats.pcd = static_cast<double>(correct_count) / n;
    const Interval ci = wilson_interval(correct_count, reps);
    stats.pcd_lo = ci.lo;
    stats.pcd_hi = ci.hi;
    stats.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    return stats;
}

std::vector<SystemClass> synthetic_truth(const ProblemSpec& spec, const MeanConfig& mean_cfg) {
    const auto offsets = build_means(mean_cfg, spec.k, spec.s);
    std::vector<SystemClass> truth(spec.k);
    std::vector<double> y(spec.s);
    for (long i = 0; i < spec.k; ++i) {
        for (long l = 0; l < spec.s; ++l) y[l] = spec.q[l] + offsets[i][l];
        truth[i] = classify_system(y, spec.q, spec.eps);
    }
    return truth;
}

MacroStats run_experiment(const ProcedurePlan& plan, const ProblemSpec& spec,
                          const MeanConfig& mean_cfg, const VarianceConfig& var_cfg,
                          long reps, SeedSpec seed, int workers) {
    spec.validate();
    const auto offsets = build_means(mean_cfg, spec.k, spec.s);
    std::vector<std::vector<double>> means(spec.k, std::vector<double>(spec.s));
    std::vector<CovarianceSpec> covariances;
    covariances.reserve(spec.k);
    for (long i = 0; i < spec.k; ++i) {
        std::vector<double> variances(spec.s);
        for (long l = 0; l < spec.s; ++l) {
            means[i][l] = spec.q[l] + offsets[i][l];
            variances[l] = variance_at(var_cfg, i, l, spec.k, spec.s);
        }
        covariances.push_back(CovarianceSpec::diagonal(std::move(variances)));
    }
    const auto truth = synthetic_truth(spec, mean_cfg);

    SourceFactory factory = [&](std::uint64_t rep) {
        return std::make_unique<MvnSource>(means, covariances, seed, rep);
    };
    return run_macro(plan, spec, truth, factory, reps, workers);
}

std::vector<SummaryRow> summarize(const std::vector<std::string>& labels,
                                  const std::vector<MacroStats>& stats,
                                  std::size_t baseline_index) {
    if (stats.empty()) throw std::invalid_argument("summarize: no rows");
    if (labels.size() != stats.size())
        throw std::invalid_argument("summarize: label/stat count mismatch");
    if (baseline_index >= stats.size())
        throw std::invalid_argument("summarize: baseline out of range");
    const double baseline = stats[baseline_index].obs_mean;
    std::vector<SummaryRow> rows;
    rows.reserve(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i)
        rows.push_back({labels[i], stats[i], stats[i].obs_mean / baseline});
    return rows;
}

}  // namespace feaskit
