#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace feaskit {

/// True status of one constraint relative to its indifference zone.
enum class ConstraintClass { desirable, acceptable, unacceptable };

/// True status of one system: desirable iff every constraint is desirable,
/// unacceptable iff any constraint is unacceptable, acceptable otherwise.
enum class SystemClass { desirable, acceptable, unacceptable };

ConstraintClass classify_constraint(double y, double q, double eps);
SystemClass classify_system(std::span<const double> y, std::span<const double> q,
                            std::span<const double> eps);

/// Feasibility-determination problem: k systems, s constraints with thresholds
/// q and tolerances eps, confidence 1 - alpha, region parameter c, and whether
/// systems are simulated independently (affects the error allocation only).
struct ProblemSpec {
    long k = 1;
    long s = 1;
    std::vector<double> q;
    std::vector<double> eps;
    double alpha = 0.05;
    int c = 1;
    bool independent = false;

    void validate() const;
};

enum class Verdict { feasible, infeasible };

struct ProcedureResult {
    std::vector<Verdict> verdicts;                 // one per system
    std::vector<long long> observations;          // per-system vector draws, pilots included
    long long total_observations = 0;
    std::vector<std::vector<double>> eps_star;    // terminating tolerance per (system, constraint)
    std::map<long long, long> stage_histogram;    // final stage counter -> number of systems

    std::vector<long> declared_feasible() const;
};

/// True iff every desirable system was declared feasible and every
/// unacceptable system was declared infeasible; acceptable systems are free.
bool is_correct_decision(std::span<const SystemClass> truth, const ProcedureResult& result);

}  // namespace feaskit
