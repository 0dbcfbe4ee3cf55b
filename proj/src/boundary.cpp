#include "feaskit/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace feaskit {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double bonferroni_share(double alpha, long k, bool independent) {
    // Per-system error budget: 1-(1-alpha)^(1/k) for independent systems,
    // alpha/k otherwise.
    return independent ? 1.0 - std::pow(1.0 - alpha, 1.0 / static_cast<double>(k))
                       : alpha / static_cast<double>(k);
}

}  // namespace

double continuation_height(double r, double v, double w, double z, int c) {
    require(v > 0.0, "continuation_height: tolerance must be positive");
    require(w > 0.0, "continuation_height: h2 must be positive");
    require(z >= 0.0, "continuation_height: variance must be nonnegative");
    require(c >= 1, "continuation_height: c must be >= 1");
    require(r >= 0.0, "continuation_height: stage must be nonnegative");
    const double cc = static_cast<double>(c);
    return std::max(0.0, w * z / (2.0 * cc * v) - v * r / (2.0 * cc));
}

double g_fn(long n, double eta, int c) {
    require(n >= 1, "g_fn: dof must be >= 1");
    require(eta > 0.0, "g_fn: eta must be positive");
    require(c >= 1, "g_fn: c must be >= 1");
    const double half_n = static_cast<double>(n) / 2.0;
    double acc = 0.0;
    for (int l = 1; l <= c; ++l) {
        const double weight = (l == c) ? 0.5 : 1.0;
        const double sign = (l % 2 == 1) ? 1.0 : -1.0;
        const double base = 1.0 + 2.0 * eta * static_cast<double>((2 * c - l) * l) /
                                      static_cast<double>(c);
        acc += sign * weight * std::pow(base, -half_n);
    }
    return acc;
}

double solve_eta(long n, double beta, int c) {
    require(n >= 1, "solve_eta: dof must be >= 1");
    require(beta > 0.0 && beta < 0.5, "solve_eta: beta must lie in (0, 1/2)");
    require(c >= 1, "solve_eta: c must be >= 1");
    if (c == 1)
        return 0.5 * (std::pow(2.0 * beta, -2.0 / static_cast<double>(n)) - 1.0);
    return solve_eta_bisect(n, beta, c);
}

double solve_eta_bisect(long n, double beta, int c) {
    require(n >= 1, "solve_eta: dof must be >= 1");
    require(beta > 0.0 && beta < 0.5, "solve_eta: beta must lie in (0, 1/2)");
    require(c >= 1, "solve_eta: c must be >= 1");
    // g is strictly decreasing with g(0+) = 1/2 and g -> 0, so the root is
    // unique. Grow the upper bracket until g drops below beta.
    double lo = 0.0;
    double hi = 1.0;
    while (g_fn(n, hi, c) > beta) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("solve_eta: bracket growth failed");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (g_fn(n, mid, c) > beta)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double beta_fb(double alpha, long k, long s, bool independent) {
    require(alpha > 0.0 && alpha < 1.0, "beta: alpha must lie in (0, 1)");
    require(k >= 1 && s >= 1, "beta: k and s must be >= 1");
    return bonferroni_share(alpha, k, independent) / static_cast<double>(s);
}

double beta_izr(double alpha, long k, std::span<const int> ladder_sizes, bool independent) {
    require(alpha > 0.0 && alpha < 1.0, "beta: alpha must lie in (0, 1)");
    require(k >= 1, "beta: k must be >= 1");
    require(!ladder_sizes.empty(), "beta: at least one constraint required");
    long sum_t = 0;
    for (int t : ladder_sizes) {
        require(t >= 1, "beta: every ladder must have at least one level");
        sum_t += t;
    }
    return bonferroni_share(alpha, k, independent) / static_cast<double>(sum_t);
}

double beta_ize(double alpha, long k, long s, bool independent) {
    require(alpha > 0.0 && alpha < 1.0, "beta: alpha must lie in (0, 1)");
    require(k >= 1 && s >= 1, "beta: k and s must be >= 1");
    return bonferroni_share(alpha, k, independent) / (2.0 * static_cast<double>(s));
}

double eta_ratio(long k, long s, long n0, double alpha, long sum_t, bool independent) {
    require(n0 >= 2, "eta_ratio: n0 must be >= 2");
    require(sum_t >= s, "eta_ratio: sum of ladder sizes must be >= s");
    const double p = 2.0 / static_cast<double>(n0 - 1);
    const double a = 2.0 * bonferroni_share(alpha, k, independent);
    const double closed = (std::pow(static_cast<double>(sum_t), p) - std::pow(a, p)) /
                          (std::pow(static_cast<double>(s), p) - std::pow(a, p));

    // Independent second route: quotient of the two eta solves.
    const double beta_relaxed = 0.5 * a / static_cast<double>(sum_t);
    const double beta_base = 0.5 * a / static_cast<double>(s);
    const double quotient = solve_eta(n0 - 1, beta_relaxed, 1) / solve_eta(n0 - 1, beta_base, 1);
    if (std::abs(closed - quotient) > 1e-9 * std::max(1.0, std::abs(closed)))
        throw std::logic_error("eta_ratio: closed form and solver quotient disagree");
    return closed;
}

double eta_ratio_limit_k(long s, long n0, long sum_t) {
    require(n0 >= 2, "eta_ratio: n0 must be >= 2");
    return std::pow(static_cast<double>(sum_t) / static_cast<double>(s),
                    2.0 / static_cast<double>(n0 - 1));
}

double eta_ratio_limit_n0(long k, long s, double alpha, long sum_t, bool independent) {
    const double a = 2.0 * bonferroni_share(alpha, k, independent);
    return (std::log(static_cast<double>(sum_t)) - std::log(a)) /
           (std::log(static_cast<double>(s)) - std::log(a));
}

double approx_obs(double delta, double sigma2, double eps, int c, double h2_1, double h2_2,
                  double xi, ApproxTermination termination) {
    require(delta >= 0.0, "approx_obs: delta must be nonnegative");
    require(eps > 0.0, "approx_obs: eps must be positive");
    require(c >= 1, "approx_obs: c must be >= 1");
    const double cc = static_cast<double>(c);
    double denom = 0.0;
    double h2 = 0.0;
    switch (termination) {
        case ApproxTermination::single:
            h2 = h2_1;
            denom = 2.0 * cc * eps * (delta + eps / (2.0 * cc));
            break;
        case ApproxTermination::level1:
            require(xi > 1.0, "approx_obs: xi must exceed 1 for a two-level ladder");
            h2 = h2_2;
            denom = 2.0 * cc * xi * eps * (delta - (xi - 1.0) * eps + xi * eps / (2.0 * cc));
            break;
        case ApproxTermination::level2:
            h2 = h2_2;
            denom = 2.0 * cc * eps * (delta + eps / (2.0 * cc));
            break;
    }
    if (!(denom > 0.0))
        throw std::domain_error("approx_obs: approximation invalid for this xi, delta");
    return h2 * sigma2 / denom;
}

double relaxed_tolerance(double pilot_mean, double q, double eps, double nu) {
    require(eps > 0.0, "relaxed_tolerance: eps must be positive");
    require(nu > 0.5 && nu <= 1.0, "relaxed_tolerance: nu must lie in (0.5, 1]");
    const double delta_hat = std::max(eps, std::abs(pilot_mean - q));
    const double xi_star = std::max(2.0, (delta_hat + eps) / (2.0 * eps));
    return nu * xi_star * eps;
}

void ToleranceLadder::validate() const {
    require(!levels.empty(), "ladder: at least one level required");
    for (double level : levels) require(level > 0.0, "ladder: levels must be positive");
    for (std::size_t i = 1; i < levels.size(); ++i)
        require(levels[i - 1] > levels[i], "ladder: levels must be strictly decreasing");
}

ToleranceLadder geometric_ladder(double eps, double xi, int levels) {
    require(eps > 0.0, "ladder: eps must be positive");
    require(levels >= 1, "ladder: at least one level required");
    require(levels == 1 || xi > 1.0, "ladder: xi must exceed 1");
    ToleranceLadder ladder;
    ladder.levels.resize(levels);
    double value = eps;
    for (int t = levels - 1; t >= 0; --t) {
        ladder.levels[t] = value;
        value *= xi;
    }
    ladder.validate();
    return ladder;
}

BoundaryParams BoundaryParams::solve(long dof, double beta, int c) {
    BoundaryParams params;
    params.c = c;
    params.dof = dof;
    params.beta = beta;
    params.eta = solve_eta(dof, beta, c);
    params.h2 = 2.0 * static_cast<double>(c) * params.eta * static_cast<double>(dof);
    return params;
}

RegionBounds shifted_region_fu(double r, double eps, double eps_l, double h2, double s2,
                               int c) {
    const double height = continuation_height(r, eps, h2, s2, c);
    const double shift = (eps_l - eps) * r;
    return {-height + shift, height + shift};
}

RegionBounds shifted_region_fd(double r, double eps, double eps_l, double h2, double s2,
                               int c) {
    const double height = continuation_height(r, eps, h2, s2, c);
    const double shift = (eps - eps_l) * r;
    return {-height + shift, height + shift};
}

}  // namespace feaskit
