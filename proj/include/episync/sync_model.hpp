#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "episync/transition_system.hpp"

namespace episync {

// Structured sync-state membership for one agent. The joint state is in
// X^i_sync when any of the enabled clauses holds:
//   - `always`: the agent is permanently connected (UGVs, bases).
//   - own state in `own_states` (e.g. docked at a depot).
//   - `pair_pred(own, partner_state)` with `partner >= 0` (e.g. docked at the
//     coalition UGV, wherever it currently is).
// `partner_sync_states` enumerates, for a given partner state, the own states
// that satisfy the pairwise clause; the solver uses it to plan rendezvous.
struct AgentSync {
    bool always = false;
    std::vector<StateId> own_states;  // sorted at SyncStates construction
    int partner = -1;
    std::function<bool(StateId own, StateId partner_state)> pair_pred;
    std::function<std::vector<StateId>(StateId partner_state)> partner_sync_states;
};

class SyncStates {
public:
    explicit SyncStates(std::vector<AgentSync> agents);

    int num_agents() const { return static_cast<int>(agents_.size()); }
    const AgentSync& spec(int agent) const;

    // x in X^i_sync.
    bool contains(int agent, const JointState& x) const;

private:
    std::vector<AgentSync> agents_;
};

// The three plan versions of one episode at step k: the planner's joint plan,
// each agent's own (eigen) plan, and the planner's belief of each eigen plan.
class PlanBeliefs {
public:
    PlanBeliefs(Trajectory global_plan, std::vector<AgentTrajectory> eigen,
                std::vector<AgentTrajectory> planner_belief, int current_step);

    // Full synchronization at k=0: eigen_i = Pi_i(plan) = belief_i for all i.
    static PlanBeliefs initial(const Trajectory& global_plan, int num_agents);

    int num_agents() const { return static_cast<int>(eigen_.size()); }
    int current_step() const { return current_step_; }

    const Trajectory& global_plan() const { return global_plan_; }
    const AgentTrajectory& eigen(int agent) const;
    const AgentTrajectory& planner_belief(int agent) const;

    void set_global_plan(Trajectory plan) { global_plan_ = std::move(plan); }
    void set_eigen(int agent, AgentTrajectory traj);
    void set_planner_belief(int agent, AgentTrajectory traj);
    void set_current_step(int k) { current_step_ = k; }

private:
    Trajectory global_plan_;
    std::vector<AgentTrajectory> eigen_;
    std::vector<AgentTrajectory> planner_belief_;
    int current_step_ = 0;
};

// The per-step synchronization update: agents whose sync predicate holds at
// x_k adopt the global plan's suffix (and the planner's belief follows); all
// others carry their previous trajectories forward. At k=0 every agent
// synchronizes regardless of membership.
PlanBeliefs sync_update(const PlanBeliefs& beliefs, const SyncStates& sync, const JointState& x_k, int k);

// Smallest step strictly greater than `after` whose planned joint state lies
// in X^agent_sync; nullopt when the plan suffix has no such step.
std::optional<int> next_sync_step(const Trajectory& plan, const SyncStates& sync, int agent, int after);

// All future sync steps of the plan for `agent`, strictly after `after`.
std::vector<int> future_sync_steps(const Trajectory& plan, const SyncStates& sync, int agent, int after);

// Steps where eigen_i differs from Pi_i(global_plan), over the overlap of
// their domains; empty iff the agent is fully synchronized.
std::vector<int> divergence(const PlanBeliefs& beliefs, int agent);

}  // namespace episync
