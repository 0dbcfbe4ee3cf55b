#include "feaskit/procedures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "feaskit/stats.hpp"

namespace feaskit {

namespace {

constexpr double kUnresolved = std::numeric_limits<double>::quiet_NaN();

void check_source(const ProblemSpec& spec, const ObservationSource& source) {
    if (source.systems() != spec.k || source.measures() != spec.s)
        throw std::invalid_argument("procedure: source shape does not match the problem");
}

/// Per-(system, constraint) monitoring state shared by the ladder procedures.
struct ConstraintMonitor {
    double sum = 0.0;        // running sum of monitored observations
    double s2 = 0.0;         // frozen variance estimate
    std::vector<double> levels;
    std::vector<signed char> zu, zd;  // per-level subroutine markers in {-1, 0, +1}
    signed char z = 0;                // final marker
    double eps_star = kUnresolved;
};

struct EngineInit {
    std::vector<ConstraintMonitor> monitors;  // k*s, row-major by system
    long long start_stage = 0;                // observations already in the sums
    bool check_at_start = true;
    long long pilot_per_system = 0;           // counted in totals, not in sums
    double h2 = 0.0;
};

/// Stage loop shared by the relaxation procedures. At each stage every live
/// (system, constraint) runs the two subroutine sweeps over its still-active
/// tolerance levels; a constraint resolves the first time the two markers for
/// a common level agree. A -1 resolution eliminates the system at once.
ProcedureResult run_ladder_engine(const ProblemSpec& spec, EngineInit init,
                                  ObservationSource& source) {
    const long k = spec.k;
    const long s = spec.s;
    auto& monitors = init.monitors;

    // Region closure at the smallest level bounds every exit stage.
    long long max_stage = init.start_stage;
    for (const auto& m : monitors) {
        const double eps_min = m.levels.back();
        const double apex = init.h2 * m.s2 / (eps_min * eps_min);
        max_stage = std::max(max_stage, static_cast<long long>(std::ceil(apex)));
    }
    max_stage += 2;

    ProcedureResult result;
    result.verdicts.assign(k, Verdict::infeasible);
    result.observations.assign(k, 0);
    result.eps_star.assign(k, std::vector<double>(s, kUnresolved));

    std::vector<char> alive(k, 1);
    std::vector<int> feasible_constraints(k, 0);
    long alive_count = k;
    long long r = init.start_stage;

    auto finish_system = [&](long i, Verdict verdict) {
        alive[i] = 0;
        --alive_count;
        result.verdicts[i] = verdict;
        result.observations[i] = init.pilot_per_system + r;
        for (long l = 0; l < s; ++l) result.eps_star[i][l] = monitors[i * s + l].eps_star;
        ++result.stage_histogram[r];
    };

    auto check_all = [&]() {
        const double stage = static_cast<double>(r);
        for (long i = 0; i < k; ++i) {
            if (!alive[i]) continue;
            bool eliminated = false;
            for (long l = 0; l < s && !eliminated; ++l) {
                ConstraintMonitor& m = monitors[i * s + l];
                if (m.z != 0) continue;
                const int levels = static_cast<int>(m.levels.size());
                // Subroutine detecting clearly unacceptable systems.
                for (int t = 0; t < levels && m.z == 0; ++t) {
                    if (m.zu[t] != 0) continue;
                    const double eps = m.levels[t];
                    const double height =
                        continuation_height(stage, eps, init.h2, m.s2, spec.c);
                    const double stat = m.sum - stage * (spec.q[l] + (spec.eps[l] - eps));
                    if (stat <= -height)
                        m.zu[t] = 1;
                    else if (stat >= height)
                        m.zu[t] = -1;
                    else
                        continue;
                    if (m.zu[t] * m.zd[t] == 1) {
                        m.z = m.zu[t];
                        m.eps_star = eps;
                    }
                }
                // Subroutine detecting clearly desirable systems.
                for (int t = 0; t < levels && m.z == 0; ++t) {
                    if (m.zd[t] != 0) continue;
                    const double eps = m.levels[t];
                    const double height =
                        continuation_height(stage, eps, init.h2, m.s2, spec.c);
                    const double stat = m.sum - stage * (spec.q[l] - (spec.eps[l] - eps));
                    if (stat <= -height)
                        m.zd[t] = 1;
                    else if (stat >= height)
                        m.zd[t] = -1;
                    else
                        continue;
                    if (m.zu[t] * m.zd[t] == 1) {
                        m.z = m.zd[t];
                        m.eps_star = eps;
                    }
                }
                if (m.z == -1)
                    eliminated = true;
                else if (m.z == 1)
                    ++feasible_constraints[i];
            }
            if (eliminated)
                finish_system(i, Verdict::infeasible);
            else if (feasible_constraints[i] == s)
                finish_system(i, Verdict::feasible);
        }
    };

    std::vector<double> draw(s);
    if (init.check_at_start) check_all();
    while (alive_count > 0) {
        ++r;
        if (r > max_stage)
            throw std::logic_error("procedure: stage exceeded the region-closure bound");
        for (long i = 0; i < k; ++i) {
            if (!alive[i]) continue;
            source.next(i, draw);
            for (long l = 0; l < s; ++l) monitors[i * s + l].sum += draw[l];
        }
        check_all();
    }

    result.total_observations = 0;
    for (long i = 0; i < k; ++i) result.total_observations += result.observations[i];
    return result;
}

EngineInit init_from_pilot(const ProblemSpec& spec, long n0, ObservationSource& source,
                           const std::vector<ToleranceLadder>& ladders, double h2) {
    EngineInit init;
    init.h2 = h2;
    init.start_stage = n0;
    init.monitors.resize(spec.k * spec.s);
    std::vector<double> draw(spec.s);
    std::vector<RunningMoments> moments(spec.s);
    for (long i = 0; i < spec.k; ++i) {
        for (long l = 0; l < spec.s; ++l) moments[l] = RunningMoments();
        for (long j = 0; j < n0; ++j) {
            source.next(i, draw);
            for (long l = 0; l < spec.s; ++l) {
                moments[l].add(draw[l]);
                init.monitors[i * spec.s + l].sum += draw[l];
            }
        }
        for (long l = 0; l < spec.s; ++l) {
            ConstraintMonitor& m = init.monitors[i * spec.s + l];
            m.s2 = moments[l].variance().value;
            m.levels = ladders[l].levels;
            m.zu.assign(m.levels.size(), 0);
            m.zd.assign(m.levels.size(), 0);
        }
    }
    return init;
}

}  // namespace

ProcedureResult run_fb(const ProblemSpec& spec, long n0, ObservationSource& source) {
    spec.validate();
    check_source(spec, source);
    if (n0 < 2) throw std::invalid_argument("fb: n0 must be >= 2");

    const double beta = beta_fb(spec.alpha, spec.k, spec.s, spec.independent);
    const BoundaryParams boundary = BoundaryParams::solve(n0 - 1, beta, spec.c);
    const long k = spec.k;
    const long s = spec.s;

    std::vector<double> sums(k * s, 0.0);
    std::vector<double> s2(k * s, 0.0);
    std::vector<double> draw(s);
    {
        std::vector<RunningMoments> moments(s);
        for (long i = 0; i < k; ++i) {
            for (long l = 0; l < s; ++l) moments[l] = RunningMoments();
            for (long j = 0; j < n0; ++j) {
                source.next(i, draw);
                for (long l = 0; l < s; ++l) {
                    moments[l].add(draw[l]);
                    sums[i * s + l] += draw[l];
                }
            }
            for (long l = 0; l < s; ++l) s2[i * s + l] = moments[l].variance().value;
        }
    }

    long long max_stage = n0;
    for (long idx = 0; idx < k * s; ++idx) {
        const double eps = spec.eps[idx % s];
        max_stage = std::max(
            max_stage, static_cast<long long>(std::ceil(boundary.h2 * s2[idx] / (eps * eps))));
    }
    max_stage += 2;

    ProcedureResult result;
    result.verdicts.assign(k, Verdict::infeasible);
    result.observations.assign(k, 0);
    result.eps_star.assign(k, std::vector<double>(s, kUnresolved));

    std::vector<char> alive(k, 1);
    std::vector<char> constraint_open(k * s, 1);
    std::vector<int> feasible_constraints(k, 0);
    long alive_count = k;
    long long r = n0;

    auto finish_system = [&](long i, Verdict verdict) {
        alive[i] = 0;
        --alive_count;
        result.verdicts[i] = verdict;
        result.observations[i] = r;
        ++result.stage_histogram[r];
    };

    auto check_all = [&]() {
        const double stage = static_cast<double>(r);
        for (long i = 0; i < k; ++i) {
            if (!alive[i]) continue;
            bool eliminated = false;
            for (long l = 0; l < s; ++l) {
                if (!constraint_open[i * s + l]) continue;
                const double eps = spec.eps[l];
                const double height =
                    continuation_height(stage, eps, boundary.h2, s2[i * s + l], spec.c);
                const double stat = sums[i * s + l] - stage * spec.q[l];
                if (stat <= -height) {
                    constraint_open[i * s + l] = 0;
                    result.eps_star[i][l] = eps;
                    ++feasible_constraints[i];
                } else if (stat >= height) {
                    result.eps_star[i][l] = eps;
                    eliminated = true;
                    break;
                }
            }
            if (eliminated)
                finish_system(i, Verdict::infeasible);
            else if (feasible_constraints[i] == s)
                finish_system(i, Verdict::feasible);
        }
    };

    check_all();
    while (alive_count > 0) {
        ++r;
        if (r > max_stage)
            throw std::logic_error("procedure: stage exceeded the region-closure bound");
        for (long i = 0; i < k; ++i) {
            if (!alive[i]) continue;
            source.next(i, draw);
            for (long l = 0; l < s; ++l) sums[i * s + l] += draw[l];
        }
        check_all();
    }

    result.total_observations = 0;
    for (long i = 0; i < k; ++i) result.total_observations += result.observations[i];
    return result;
}

ProcedureResult run_izr(const ProblemSpec& spec, const std::vector<ToleranceLadder>& ladders,
                        long n0, ObservationSource& source) {
    std::vector<int> sizes;
    sizes.reserve(ladders.size());
    for (const auto& ladder : ladders) sizes.push_back(ladder.size());
    const double beta = beta_izr(spec.alpha, spec.k, sizes, spec.independent);
    return run_izr_with_beta(spec, ladders, n0, source, beta);
}

ProcedureResult run_izr_with_beta(const ProblemSpec& spec,
                                  const std::vector<ToleranceLadder>& ladders, long n0,
                                  ObservationSource& source, double beta) {
    spec.validate();
    check_source(spec, source);
    if (n0 < 2) throw std::invalid_argument("izr: n0 must be >= 2");
    if (static_cast<long>(ladders.size()) != spec.s)
        throw std::invalid_argument("izr: one ladder per constraint required");
    for (long l = 0; l < spec.s; ++l) {
        ladders[l].validate();
        if (ladders[l].final_level() != spec.eps[l])
            throw std::invalid_argument("izr: ladder must end at the problem tolerance");
    }

    const BoundaryParams boundary = BoundaryParams::solve(n0 - 1, beta, spec.c);
    EngineInit init = init_from_pilot(spec, n0, source, ladders, boundary.h2);
    return run_ladder_engine(spec, std::move(init), source);
}

ProcedureResult run_ize(const ProblemSpec& spec, long n0_prime, long n0_double_prime,
                        double nu, ObservationSource& source) {
    spec.validate();
    check_source(spec, source);
    if (n0_prime < 2) throw std::invalid_argument("ize: pilot count must be >= 2");
    if (n0_double_prime == 1 || n0_double_prime < 0)
        throw std::invalid_argument("ize: monitored count must be 0 or >= 2");
    if (!(nu > 0.5 && nu <= 1.0))
        throw std::invalid_argument("ize: nu must lie in (0.5, 1]");

    const long dof =
        n0_double_prime >= 2 ? n0_prime + n0_double_prime - 2 : n0_prime - 1;
    const double beta = beta_ize(spec.alpha, spec.k, spec.s, spec.independent);
    const BoundaryParams boundary = BoundaryParams::solve(dof, beta, spec.c);

    EngineInit init;
    init.h2 = boundary.h2;
    init.start_stage = n0_double_prime;
    init.check_at_start = n0_double_prime >= 2;
    init.pilot_per_system = n0_prime;
    init.monitors.resize(spec.k * spec.s);

    std::vector<double> draw(spec.s);
    std::vector<RunningMoments> pilot(spec.s), monitored(spec.s);
    for (long i = 0; i < spec.k; ++i) {
        for (long l = 0; l < spec.s; ++l) {
            pilot[l] = RunningMoments();
            monitored[l] = RunningMoments();
        }
        for (long j = 0; j < n0_prime; ++j) {
            source.next(i, draw);
            for (long l = 0; l < spec.s; ++l) pilot[l].add(draw[l]);
        }
        for (long j = 0; j < n0_double_prime; ++j) {
            source.next(i, draw);
            for (long l = 0; l < spec.s; ++l) {
                monitored[l].add(draw[l]);
                init.monitors[i * spec.s + l].sum += draw[l];
            }
        }
        for (long l = 0; l < spec.s; ++l) {
            ConstraintMonitor& m = init.monitors[i * spec.s + l];
            const VarianceEstimate sp2 = pilot[l].variance();
            const VarianceEstimate spp2 = n0_double_prime >= 2
                                              ? monitored[l].variance()
                                              : VarianceEstimate{0.0, 0};
            m.s2 = pooled_variance(sp2, spp2, n0_prime, n0_double_prime).value;
            const double eps1 =
                relaxed_tolerance(pilot[l].mean(), spec.q[l], spec.eps[l], nu);
            m.levels = {eps1, spec.eps[l]};
            m.zu.assign(2, 0);
            m.zd.assign(2, 0);
        }
    }
    return run_ladder_engine(spec, std::move(init), source);
}

}  // namespace feaskit
