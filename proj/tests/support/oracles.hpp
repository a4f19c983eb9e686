#pragma once

#include <optional>
#include <vector>

#include "episync/solver.hpp"
#include "episync/transition_system.hpp"

// Independent reference implementations used to cross-check the library.
// Deliberately written as naive enumerations straight from the definitions.
namespace episync::testing {

// States from which `target` is reachable by a walk of exactly n edges,
// found by enumerating all n-edge walks. Sorted ascending.
std::vector<StateId> reach_oracle(const AgentTransitionSystem& system, StateId target, int n);

// Smallest n >= 1 with disturbed in reach_oracle(eigen(step+n), n), searched
// up to min(n_max, remaining plan length).
std::optional<int> min_recovery_oracle(const AgentTransitionSystem& system, StateId disturbed,
                                       const AgentTrajectory& eigen, int step, int n_max);

// All lexicographically-minimal-comparable bridges: every valid state
// sequence disturbed -> eigen(step+n) of exactly n transitions.
std::vector<std::vector<StateId>> enumerate_bridges(const AgentTransitionSystem& system,
                                                    StateId disturbed, StateId target, int n);

struct JointOracleResult {
    bool feasible = false;
    int completion = -1;
};

// Exhaustive minimal-completion search over the explicit joint product,
// honoring pins, sync visits, and the horizon. Small instances only.
JointOracleResult joint_solve_oracle(const SolveRequest& req);

}  // namespace episync::testing
