#pragma once

#include "feaskit/boundary.hpp"
#include "feaskit/problem.hpp"
#include "feaskit/sources.hpp"

namespace feaskit {

/// Single-tolerance fully sequential feasibility check (baseline procedure).
/// Takes n0 pilot vectors per system, freezes the per-constraint variances,
/// then monitors sum(Y - q) against the triangular region until every system
/// is declared feasible or eliminated.
ProcedureResult run_fb(const ProblemSpec& spec, long n0, ObservationSource& source);

/// Relaxation procedure: per constraint, a ladder of decreasing tolerance
/// levels is tested by twin subroutines with thresholds q + eps_l - eps and
/// q - eps_l + eps; a constraint resolves when both subroutines exit the same
/// way at a common level.
ProcedureResult run_izr(const ProblemSpec& spec, const std::vector<ToleranceLadder>& ladders,
                        long n0, ObservationSource& source);

/// Same as run_izr with the error allocation overridden (analysis hook).
ProcedureResult run_izr_with_beta(const ProblemSpec& spec,
                                  const std::vector<ToleranceLadder>& ladders, long n0,
                                  ObservationSource& source, double beta);

/// Relaxation procedure with estimation: n0p pilot vectors per system estimate
/// the mean offsets and feed a per-(system, constraint) two-level ladder; n0pp
/// further vectors start the monitored sums. Pilot vectors count toward the
/// observation totals but never enter the monitoring statistics.
ProcedureResult run_ize(const ProblemSpec& spec, long n0_prime, long n0_double_prime,
                        double nu, ObservationSource& source);

}  // namespace feaskit
