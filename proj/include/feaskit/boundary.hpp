#pragma once

#include <span>
#include <vector>

namespace feaskit {

/// Triangular continuation-region half-height
///   R(r; v, w, z) = max{0, wz/(2cv) - v r/(2c)}.
/// Nonincreasing in r and identically zero once r >= wz/v^2.
double continuation_height(double r, double v, double w, double z, int c);

/// g_n(eta) = sum_{l=1}^{c} (-1)^{l+1} (1 - I(l=c)/2) (1 + 2 eta (2c-l) l / c)^{-n/2}.
/// Strictly decreasing in eta with supremum 1/2 at eta -> 0+.
double g_fn(long n, double eta, int c);

/// Root of g_n(eta) = beta. For c = 1 this is the closed form
/// eta = [(2 beta)^{-2/n} - 1] / 2; for c > 1 the root is found by bisection.
/// `n` is the degrees of freedom the caller supplies (e.g. n0 - 1).
double solve_eta(long n, double beta, int c);

/// Bisection solver for any c >= 1 (used to cross-check the closed form).
double solve_eta_bisect(long n, double beta, int c);

/// Per-test error allocations for the three procedures.
double beta_fb(double alpha, long k, long s, bool independent);
double beta_izr(double alpha, long k, std::span<const int> ladder_sizes, bool independent);
double beta_ize(double alpha, long k, long s, bool independent);

/// Ratio eta / eta_B measuring the continuation-region inflation of the
/// relaxation procedure relative to the single-tolerance baseline (c = 1).
/// Evaluated both in closed form and as a quotient of two eta solves; the two
/// routes are required to agree.
double eta_ratio(long k, long s, long n0, double alpha, long sum_t, bool independent);

/// Limit of eta_ratio as the system count grows: (sum_t / s)^{2/(n0-1)}.
double eta_ratio_limit_k(long s, long n0, long sum_t);

/// Limit of eta_ratio as the initial sample size grows (log-quotient form).
double eta_ratio_limit_n0(long k, long s, double alpha, long sum_t, bool independent);

enum class ApproxTermination {
    single,  // one tolerance level
    level1,  // two levels, decision at the relaxed level xi * eps
    level2,  // two levels, decision at the original level eps
};

/// Approximate observation count needed to resolve one constraint whose mean
/// sits `delta` away from its threshold. Throws if the requested (xi, delta)
/// combination yields a nonpositive denominator, i.e. the approximation is
/// invalid for that pairing.
double approx_obs(double delta, double sigma2, double eps, int c, double h2_1, double h2_2,
                  double xi, ApproxTermination termination);

/// Estimated first-stage relaxed tolerance from pilot data:
///   Delta = max{eps, |pilot_mean - q|},  xi* = max{2, (Delta + eps)/(2 eps)},
///   returns nu * xi* * eps (> eps whenever nu > 1/2).
double relaxed_tolerance(double pilot_mean, double q, double eps, double nu);

/// Strictly decreasing tolerance levels ending at the problem tolerance.
struct ToleranceLadder {
    std::vector<double> levels;

    int size() const { return static_cast<int>(levels.size()); }
    double final_level() const { return levels.back(); }
    void validate() const;
};

/// Ladder {xi^(T-1) eps, ..., xi eps, eps} for a multiplier xi > 1.
ToleranceLadder geometric_ladder(double eps, double xi, int levels);

/// Solved continuation-region parameters: g_n(eta) = beta and h2 = 2 c eta n.
struct BoundaryParams {
    int c = 1;
    long dof = 0;
    double beta = 0.0;
    double eta = 0.0;
    double h2 = 0.0;

    static BoundaryParams solve(long dof, double beta, int c);
};

/// Bounds of a subroutine's continuation region after shifting its monitoring
/// statistic back to sum(Y) - r q coordinates (used for the nesting checks).
struct RegionBounds {
    double lo = 0.0;
    double hi = 0.0;
};

RegionBounds shifted_region_fu(double r, double eps, double eps_l, double h2, double s2,
                               int c = 1);
RegionBounds shifted_region_fd(double r, double eps, double eps_l, double h2, double s2,
                               int c = 1);

}  // namespace feaskit
