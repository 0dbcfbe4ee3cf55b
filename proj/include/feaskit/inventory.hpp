#pragma once

#include <vector>

#include "feaskit/rng.hpp"
#include "feaskit/sources.hpp"

namespace feaskit {

/// Periodic-review (s, S) policy: whenever the inventory level at the start of
/// a review period is below `reorder_point`, order up to `order_up_to`.
struct InventoryPolicy {
    int reorder_point = 20;  // s
    int order_up_to = 40;    // S
};

struct InventoryParams {
    double demand_mean = 25.0;      // Poisson demand per review period
    double fixed_order_cost = 32.0;
    double unit_order_cost = 3.0;
    double holding_cost = 1.0;      // per unit on hand per period
    double penalty_cost = 5.0;      // per unit backlogged per period
    int run_length = 30;            // measured review periods per observation
    int warmup = 100;               // discarded review periods per observation
};

/// One observation: fraction of measured periods with a stockout and the
/// average per-period cost (ordering + holding + penalty). Unmet demand is
/// backlogged; a stockout is a period whose demand exceeds the stock on hand
/// after ordering.
struct InventoryObservation {
    double stockout_fraction = 0.0;
    double average_cost = 0.0;
};

/// Simulates one replication: start at level S, run warmup + run_length
/// periods, average the measured window.
InventoryObservation simulate_replication(const InventoryPolicy& policy,
                                          const InventoryParams& params, RandomStream& stream,
                                          const PoissonTable& demand);

InventoryObservation simulate_replication(const InventoryPolicy& policy,
                                          const InventoryParams& params, RandomStream& stream);

/// All policies with 20 <= s <= 80, 40 <= S <= 100, s <= S, in lexicographic
/// order; exactly 2901 entries.
std::vector<InventoryPolicy> policy_grid();

struct SteadyStateResult {
    double stockout_probability = 0.0;
    double expected_cost = 0.0;
};

/// Exact steady-state performance from the Markov chain on the inventory
/// level at the start of a review period (before ordering). Demand is
/// truncated at `max_demand` (chosen automatically when negative); the
/// truncated tail mass must be below 1e-12 or the call fails. When
/// `stationary` is given it receives the stationary distribution over the
/// reachable states in increasing level order.
SteadyStateResult steady_state(const InventoryPolicy& policy, const InventoryParams& params,
                               int max_demand = -1, std::vector<double>* stationary = nullptr);

/// Observation source over a list of policies; measure 0 is the stockout
/// fraction, measure 1 the average cost.
class InventorySource : public ObservationSource {
public:
    InventorySource(std::vector<InventoryPolicy> policies, InventoryParams params,
                    SeedSpec seed, std::uint64_t rep);

    void next(long system, std::span<double> out) override;
    long systems() const override { return static_cast<long>(policies_.size()); }
    long measures() const override { return 2; }

private:
    std::vector<InventoryPolicy> policies_;
    InventoryParams params_;
    PoissonTable demand_;
    std::vector<RandomStream> streams_;
};

}  // namespace feaskit
