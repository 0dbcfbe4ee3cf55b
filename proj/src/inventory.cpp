#include "feaskit/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace feaskit {

InventoryObservation simulate_replication(const InventoryPolicy& policy,
                                          const InventoryParams& params, RandomStream& stream,
                                          const PoissonTable& demand) {
    if (policy.reorder_point > policy.order_up_to)
        throw std::invalid_argument("inventory: reorder point must not exceed order-up-to");
    const int total_periods = params.warmup + params.run_length;
    long long level = policy.order_up_to;
    long stockouts = 0;
    double cost_sum = 0.0;
    for (int t = 0; t < total_periods; ++t) {
        double period_cost = 0.0;
        long long on_hand = level;
        if (level < policy.reorder_point) {
            period_cost += params.fixed_order_cost +
                           params.unit_order_cost *
                               static_cast<double>(policy.order_up_to - level);
            on_hand = policy.order_up_to;
        }
        const int d = demand.sample(stream);
        level = on_hand - d;
        if (level >= 0)
            period_cost += params.holding_cost * static_cast<double>(level);
        else
            period_cost += params.penalty_cost * static_cast<double>(-level);
        if (t >= params.warmup) {
            cost_sum += period_cost;
            if (d > on_hand) ++stockouts;
        }
    }
    InventoryObservation obs;
    obs.stockout_fraction =
        static_cast<double>(stockouts) / static_cast<double>(params.run_length);
    obs.average_cost = cost_sum / static_cast<double>(params.run_length);
    return obs;
}

InventoryObservation simulate_replication(const InventoryPolicy& policy,
                                          const InventoryParams& params, RandomStream& stream) {
    const PoissonTable demand(params.demand_mean);
    return simulate_replication(policy, params, stream, demand);
}

std::vector<InventoryPolicy> policy_grid() {
    std::vector<InventoryPolicy> grid;
    for (int s = 20; s <= 80; ++s)
        for (int S = 40; S <= 100; ++S)
            if (s <= S) grid.push_back({s, S});
    return grid;
}

SteadyStateResult steady_state(const InventoryPolicy& policy, const InventoryParams& params,
                               int max_demand, std::vector<double>* stationary) {
    if (policy.reorder_point > policy.order_up_to)
        throw std::invalid_argument("inventory: reorder point must not exceed order-up-to");
    const PoissonTable demand(params.demand_mean, 1e-16);
    if (max_demand < 0) {
        max_demand = 0;
        while (demand.tail(max_demand) >= 1e-12) ++max_demand;
    } else if (demand.tail(max_demand) >= 1e-12) {
        throw std::invalid_argument("inventory: demand truncation too shallow");
    }

    // Demand distribution truncated at max_demand with the tail lumped onto
    // the last point so the transition rows sum to one.
    std::vector<double> dp(max_demand + 1);
    for (int d = 0; d <= max_demand; ++d) dp[d] = demand.pmf(d);
    dp[max_demand] += demand.tail(max_demand);

    const int s_small = policy.reorder_point;
    const int s_big = policy.order_up_to;
    auto on_hand_for = [&](int level) { return level < s_small ? s_big : level; };

    // States reachable from the initial level S. With positive demand mass on
    // every point this is the full interval [s - max_demand, S]; with the
    // zero-demand parameterization it collapses to {S}.
    std::vector<int> states;
    {
        std::unordered_map<int, char> seen;
        std::vector<int> frontier = {s_big};
        seen[s_big] = 1;
        while (!frontier.empty()) {
            const int x = frontier.back();
            frontier.pop_back();
            const int h = on_hand_for(x);
            for (int d = 0; d <= max_demand; ++d) {
                if (dp[d] <= 0.0) continue;
                const int nxt = h - d;
                if (!seen.count(nxt)) {
                    seen[nxt] = 1;
                    frontier.push_back(nxt);
                }
            }
        }
        for (const auto& entry : seen) states.push_back(entry.first);
        std::sort(states.begin(), states.end());
    }
    const int n = static_cast<int>(states.size());
    std::unordered_map<int, int> index;
    for (int idx = 0; idx < n; ++idx) index[states[idx]] = idx;

    // Transition kernel P(x -> on_hand(x) - d).
    std::vector<double> P(static_cast<std::size_t>(n) * n, 0.0);
    for (int idx = 0; idx < n; ++idx) {
        const int h = on_hand_for(states[idx]);
        for (int d = 0; d <= max_demand; ++d) {
            if (dp[d] <= 0.0) continue;
            const auto it = index.find(h - d);
            if (it == index.end())
                throw std::logic_error("inventory: transition leaves the state space");
            P[static_cast<std::size_t>(idx) * n + it->second] += dp[d];
        }
    }

    // Stationary distribution: replace one balance equation with the
    // normalization and solve by Gaussian elimination with partial pivoting.
    std::vector<double> A(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> rhs(n, 0.0);
    for (int col = 0; col < n; ++col) A[col] = 1.0;
    rhs[0] = 1.0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i)
            A[static_cast<std::size_t>(j) * n + i] =
                P[static_cast<std::size_t>(i) * n + j] - (i == j ? 1.0 : 0.0);

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(A[static_cast<std::size_t>(row) * n + col]) >
                std::abs(A[static_cast<std::size_t>(pivot) * n + col]))
                pivot = row;
        if (A[static_cast<std::size_t>(pivot) * n + col] == 0.0)
            throw std::runtime_error("inventory: singular stationary system");
        if (pivot != col) {
            for (int c2 = 0; c2 < n; ++c2)
                std::swap(A[static_cast<std::size_t>(pivot) * n + c2],
                          A[static_cast<std::size_t>(col) * n + c2]);
            std::swap(rhs[pivot], rhs[col]);
        }
        const double inv = 1.0 / A[static_cast<std::size_t>(col) * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double factor = A[static_cast<std::size_t>(row) * n + col] * inv;
            if (factor == 0.0) continue;
            A[static_cast<std::size_t>(row) * n + col] = 0.0;
            for (int c2 = col + 1; c2 < n; ++c2)
                A[static_cast<std::size_t>(row) * n + c2] -=
                    factor * A[static_cast<std::size_t>(col) * n + c2];
            rhs[row] -= factor * rhs[col];
        }
    }
    std::vector<double> pi(n, 0.0);
    for (int row = n - 1; row >= 0; --row) {
        double acc = rhs[row];
        for (int c2 = row + 1; c2 < n; ++c2)
            acc -= A[static_cast<std::size_t>(row) * n + c2] * pi[c2];
        pi[row] = acc / A[static_cast<std::size_t>(row) * n + row];
    }

    if (stationary) *stationary = pi;

    SteadyStateResult result;
    for (int idx = 0; idx < n; ++idx) {
        const int x = states[idx];
        const int h = on_hand_for(x);
        double order_cost = 0.0;
        if (x < s_small)
            order_cost = params.fixed_order_cost +
                         params.unit_order_cost * static_cast<double>(s_big - x);
        double hold_pen = 0.0;
        for (int d = 0; d <= max_demand; ++d) {
            if (dp[d] <= 0.0) continue;
            const int end_level = h - d;
            hold_pen += dp[d] * (end_level >= 0
                                     ? params.holding_cost * static_cast<double>(end_level)
                                     : params.penalty_cost * static_cast<double>(-end_level));
        }
        result.stockout_probability += pi[idx] * demand.tail(h);
        result.expected_cost += pi[idx] * (order_cost + hold_pen);
    }
    return result;
}

InventorySource::InventorySource(std::vector<InventoryPolicy> policies, InventoryParams params,
                                 SeedSpec seed, std::uint64_t rep)
    : policies_(std::move(policies)), params_(params), demand_(params.demand_mean) {
    if (policies_.empty()) throw std::invalid_argument("inventory source: no policies");
    streams_.reserve(policies_.size());
    for (std::size_t i = 0; i < policies_.size(); ++i)
        streams_.push_back(derive_stream(seed, rep, i));
}

void InventorySource::next(long system, std::span<double> out) {
    if (out.size() != 2) throw std::invalid_argument("inventory source: dimension mismatch");
    const InventoryObservation obs =
        simulate_replication(policies_[system], params_, streams_[system], demand_);
    out[0] = obs.stockout_fraction;
    out[1] = obs.average_cost;
}

}  // namespace feaskit
