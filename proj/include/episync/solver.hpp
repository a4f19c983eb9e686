#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "episync/sync_model.hpp"
#include "episync/tasking.hpp"
#include "episync/transition_system.hpp"

namespace episync {

// Keep agent i at a known trajectory point: pi_i(tau(step)) must equal `state`.
struct PinConstraint {
    int agent = -1;
    int step = 0;
    StateId state = 0;

    friend bool operator==(const PinConstraint&, const PinConstraint&) = default;
};

// The planned joint state at `step` must lie in X^agent_sync.
struct SyncVisitConstraint {
    int agent = -1;
    int step = 0;

    friend bool operator==(const SyncVisitConstraint&, const SyncVisitConstraint&) = default;
};

struct SolverOptions {
    int horizon = 200;  // max plan length; exceeding it is infeasible
    // Joint product spaces at most this large are searched exactly (complete
    // within the horizon); larger instances use the per-agent strategy.
    std::uint64_t exact_state_limit = 20000;
    // Mission close-out (per-agent strategy only, best effort): after its
    // tasks, each intermittently-synced agent continues to a sync state it can
    // hold, and the plan idles there a few extra steps. Keeps a rendezvous at
    // the plan tail for late replans and gives recovery room to rejoin.
    bool close_at_sync = true;
    int close_idle_steps = 4;
};

struct SolveRequest {
    const MultiAgentTransitionSystem* system = nullptr;
    const SyncStates* sync = nullptr;
    int start_step = 0;
    JointState start;
    TaskSiteAssignment assignment;
    std::vector<PinConstraint> pins;
    std::vector<SyncVisitConstraint> sync_visits;
    SolverOptions options;
};

enum class InfeasibleReason { task, pin, sync_visit, horizon, internal };

const char* to_string(InfeasibleReason r);

struct Infeasible {
    InfeasibleReason reason = InfeasibleReason::task;
    std::string detail;
};

struct SolveResult {
    std::optional<Trajectory> plan;
    std::optional<Infeasible> error;
    int completion_step = -1;  // step at which the last task class is first satisfied

    bool ok() const { return plan.has_value(); }
};

// The constraint solver: a task-satisfying joint trajectory from the start
// state honoring every pin and sync visit, minimizing the completion step of
// the last task site; ties resolved by the lexicographically smallest state
// sequence. Output is always re-validated by audit_plan before it is
// returned.
SolveResult solve(const SolveRequest& req);

// Independent constraint audit: start state, transition validity, task
// satisfaction, pins, sync visits. Returns a description of the first
// violation, or nullopt when the plan is clean. Deliberately built only from
// the public checking primitives, not the search.
std::optional<std::string> audit_plan(const SolveRequest& req, const Trajectory& plan);

}  // namespace episync
