#pragma once

#include <optional>

#include "episync/solver.hpp"
#include "episync/sync_model.hpp"

namespace episync {

enum class PlanMode { alg1, alg3 };

const char* to_string(PlanMode m);

struct PlannerResult {
    enum class Status { ok, no_future_sync, infeasible };

    Status status = Status::ok;
    std::optional<Trajectory> plan;
    int completion_step = -1;
    int no_sync_agent = -1;           // set for no_future_sync
    std::optional<Infeasible> error;  // set for infeasible
    // The constraints that were handed to the solver, for trace/audit.
    std::vector<PinConstraint> pins;
    std::vector<SyncVisitConstraint> sync_visits;

    bool ok() const { return status == Status::ok; }
};

// Synchronization-constrained replanning. For every agent absent at x^k
// (x^k outside X^i_sync), the old plan's sync schedule constrains the new
// plan: the agent's believed trajectory is pinned up to its next expected
// synchronization, and the new plan must keep that synchronization
// reachable. alg1 keeps only the first future sync index; alg3 keeps the
// whole future sync schedule of the old plan.
PlannerResult plan_with_sync_mode(const PlanBeliefs& beliefs, const SyncStates& sync,
                                  const MultiAgentTransitionSystem& system, const JointState& x_k,
                                  int k, const TaskSiteAssignment& assignment,
                                  const SolverOptions& options, PlanMode mode);

inline PlannerResult plan_with_sync(const PlanBeliefs& beliefs, const SyncStates& sync,
                                    const MultiAgentTransitionSystem& system, const JointState& x_k,
                                    int k, const TaskSiteAssignment& assignment,
                                    const SolverOptions& options) {
    return plan_with_sync_mode(beliefs, sync, system, x_k, k, assignment, options, PlanMode::alg1);
}

inline PlannerResult plan_with_sync_disturbance(const PlanBeliefs& beliefs, const SyncStates& sync,
                                                const MultiAgentTransitionSystem& system,
                                                const JointState& x_k, int k,
                                                const TaskSiteAssignment& assignment,
                                                const SolverOptions& options) {
    return plan_with_sync_mode(beliefs, sync, system, x_k, k, assignment, options, PlanMode::alg3);
}

}  // namespace episync
