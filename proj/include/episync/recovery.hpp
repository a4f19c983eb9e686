#pragma once

#include <optional>
#include <vector>

#include "episync/transition_system.hpp"

namespace episync {

inline constexpr int kMaxReachDepth = 256;

struct ReachQuery {
    const AgentTransitionSystem* system = nullptr;
    StateId target = 0;
    int depth = 0;
    int max_depth = kMaxReachDepth;
};

// Reach_n(x): states from which x is reachable by a path of exactly n
// transitions. Reach_0(x) = {x}. Sorted ascending.
std::vector<StateId> backward_reach(const ReachQuery& q);

// Smallest n >= 1 with `disturbed` in Reach_n(eigen(step + n)); nullopt when
// no such n exists within min(n_max, remaining plan length). Requires an
// actual mismatch: disturbed != eigen(step).
std::optional<int> min_recovery_steps(const AgentTransitionSystem& system, StateId disturbed,
                                      const AgentTrajectory& eigen, int step, int n_max);

// n_max defaulted to the remaining plan length.
std::optional<int> min_recovery_steps(const AgentTransitionSystem& system, StateId disturbed,
                                      const AgentTrajectory& eigen, int step);

struct DisturbanceRecord {
    int agent = -1;
    int step = 0;
    StateId planned = 0;
    StateId realized = 0;
    std::optional<int> n_star;  // nullopt = unrecoverable
};

// The recovered eigen trajectory: starts at `step` with the disturbed state,
// bridges back onto the old eigen plan at step + n*, and reattaches the old
// suffix verbatim. The bridge is the lexicographically smallest valid state
// sequence under the fixed state ordering. Nullopt when unrecoverable.
std::optional<AgentTrajectory> recover(const AgentTransitionSystem& system, StateId disturbed,
                                       const AgentTrajectory& eigen, int step);

}  // namespace episync
