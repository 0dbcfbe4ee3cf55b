#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "feaskit/boundary.hpp"
#include "feaskit/problem.hpp"
#include "feaskit/procedures.hpp"
#include "feaskit/sources.hpp"

namespace feaskit {

/// Mean layouts: concentrated places every mean a fixed offset from its
/// threshold; scattered spreads the offsets with the system index. Systems
/// split into three blocks: 1..b_lower all-feasible, b_lower+1..b_upper with m
/// feasible constraints, b_upper+1..k all-infeasible.
enum class MeanKind { concentrated, scattered };

struct MeanConfig {
    MeanKind kind = MeanKind::concentrated;
    long b_lower = 0;
    long b_upper = 0;
    long m = 0;
    std::vector<double> d;  // per-constraint separation, >= 0
};

/// k x s matrix of mean offsets relative to the thresholds.
std::vector<std::vector<double>> build_means(const MeanConfig& cfg, long k, long s);

/// Number of acceptable systems per constraint under the scattered layout.
std::vector<long> count_acceptable(const MeanConfig& cfg, long k,
                                   std::span<const double> eps);

enum class VarianceKind {
    constant,
    increasing_constraint,
    decreasing_constraint,
    increasing_system,
    decreasing_system,
};

struct VarianceConfig {
    VarianceKind kind = VarianceKind::constant;
    double sigma2 = 1.0;
};

/// Variance of measure l for system i (both 0-based); the average over the
/// varying index equals sigma2.
double variance_at(const VarianceConfig& cfg, long i, long l, long k, long s);

/// One procedure choice plus its tuning parameters.
struct ProcedurePlan {
    enum class Kind { fb, izr, ize };
    Kind kind = Kind::fb;
    std::string label = "FB";
    long n0 = 20;           // fb / izr
    double xi = 2.0;        // izr geometric ladder
    int ladder_levels = 2;  // izr
    std::vector<ToleranceLadder> explicit_ladders;  // izr, overrides xi when set
    long n0_prime = 15;     // ize
    long n0_double_prime = 5;
    double nu = 0.8;

    static ProcedurePlan fb(long n0);
    static ProcedurePlan izr(long n0, double xi, int levels = 2);
    static ProcedurePlan ize(long n0_prime, long n0_double_prime, double nu);
};

ProcedureResult run_plan(const ProcedurePlan& plan, const ProblemSpec& spec,
                         ObservationSource& source);

/// Aggregate over R macro replications: mean/standard error of the total
/// observation count and the estimated probability of correct decision with
/// its Wilson 95% interval.
struct MacroStats {
    long reps = 0;
    double obs_mean = 0.0;
    double obs_se = 0.0;
    double pcd = 0.0;
    double pcd_lo = 0.0;
    double pcd_hi = 0.0;
    double wall_ms = 0.0;
};

using SourceFactory =
    std::function<std::unique_ptr<ObservationSource>(std::uint64_t rep)>;

/// Runs R independent replications of one procedure, scoring each against the
/// supplied ground truth. Replications are distributed over `workers` threads;
/// results are identical for any worker count because each replication's
/// streams derive from (seed, rep, sys) alone and aggregation is reduced in
/// replication order.
MacroStats run_macro(const ProcedurePlan& plan, const ProblemSpec& spec,
                     std::span<const SystemClass> truth, const SourceFactory& factory,
                     long reps, int workers);

/// Synthetic experiment wrapper: builds the mean/variance layout, classifies
/// ground truth, and runs the macro loop with MVN sources.
MacroStats run_experiment(const ProcedurePlan& plan, const ProblemSpec& spec,
                          const MeanConfig& mean_cfg, const VarianceConfig& var_cfg,
                          long reps, SeedSpec seed, int workers);

/// Ground truth for a synthetic experiment (mean offsets shifted by q).
std::vector<SystemClass> synthetic_truth(const ProblemSpec& spec, const MeanConfig& mean_cfg);

struct SummaryRow {
    std::string label;
    MacroStats stats;
    double obs_ratio = 1.0;  // vs the designated baseline row
};

/// Comparison rows with per-row observation ratios against `baseline_index`.
std::vector<SummaryRow> summarize(const std::vector<std::string>& labels,
                                  const std::vector<MacroStats>& stats,
                                  std::size_t baseline_index = 0);

}  // namespace feaskit
